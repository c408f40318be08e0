"""Executable checks of the kernel's defining properties and the quadrature
error bound; backs the `verify` CLI subcommand and is reused by the tests."""

from dataclasses import dataclass

import numpy as np

from .greens import green_branch, green_eval, split_kernel
from .quadrature import gauss_rule, integrate_on


@dataclass
class PropertyResult:
    name: str
    violation: float
    tolerance: float

    @property
    def passed(self):
        return self.violation <= self.tolerance

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: max violation {self.violation:.3e} "
                f"(tolerance {self.tolerance:.1e})")


def verify_green_properties(seed=7, kernels=None):
    """Check the four defining properties of the kernel.

    kernels may substitute perturbed split tables (see the mutation tests);
    the reconstruction property must then fail.
    """
    rng = np.random.default_rng(seed)
    kernels = kernels or [split_kernel(j) for j in range(4)]
    results = []

    t = np.linspace(-1.0, 1.0, 100)
    worst = 0.0
    for j in (0, 1):
        worst = max(worst, np.max(np.abs(green_eval(j, -1.0, t))),
                    np.max(np.abs(green_eval(j, 1.0, t))))
    results.append(PropertyResult("boundary vanishing of G0, G1 at x = -1, 1",
                                  worst, 1e-14))

    delta = 1e-8
    x = rng.uniform(-0.9, 0.9, size=50)
    worst = 0.0
    for j in (0, 1, 2):
        worst = max(worst, np.max(np.abs(green_eval(j, x, x + delta)
                                         - green_eval(j, x, x - delta))))
    results.append(PropertyResult("continuity of G0..G2 across t = x",
                                  worst, 1e-6))

    jump = green_eval(3, x, x + delta) - green_eval(3, x, x - delta)
    results.append(PropertyResult("t-jump of G3 across t = x equals -1",
                                  float(np.max(np.abs(jump + 1.0))), 1e-6))

    worst = 0.0
    for j in range(4):
        xs = rng.uniform(-1.0, 1.0, size=400)
        ts = rng.uniform(-1.0, 1.0, size=400)
        lo, hi = np.minimum(xs, ts), np.maximum(xs, ts)
        worst = max(
            worst,
            np.max(np.abs(kernels[j].evaluate(hi, lo, 'q') - green_branch(j, hi, lo, 'q'))),
            np.max(np.abs(kernels[j].evaluate(lo, hi, 'p') - green_branch(j, lo, hi, 'p'))),
        )
    results.append(PropertyResult("split-kernel reconstruction matches the "
                                  "branch formulas", worst, 1e-13))

    # per-branch x-degree <= 3: each split table has exactly 4 - j x-powers
    structural = 0.0 if all(kernels[j].q_table.shape == (4 - j, 4)
                            and kernels[j].p_table.shape == (4 - j, 4)
                            for j in range(4)) else np.inf
    results.append(PropertyResult("x-degree per branch is at most 3", structural, 0.0))
    return results


def verify_quadrature_bound(n, lengths=(1.0, 0.5, 0.25), floor=1e-15):
    """Empirical decay of the quadrature error for f = sin(5x) on [0, L].

    Halving L must shrink the error by at least 2^(2n) until the error falls
    under the rounding floor.  The reported violation is the worst deficit
    factor (required ratio over observed ratio), 1.0 meaning exactly on the
    bound.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rule = gauss_rule(n)
    errors = []
    for length in lengths:
        nodes = 0.5 * length * (rule.nodes + 1.0)
        approx = integrate_on(rule, (0.0, length), np.sin(5.0 * nodes))
        exact = (1.0 - np.cos(5.0 * length)) / 5.0
        errors.append(abs(approx - exact))
    required = 2.0 ** (2 * n)
    worst = 0.0
    for coarse, fine in zip(errors, errors[1:]):
        if fine <= floor:
            continue
        worst = max(worst, required / (coarse / fine))
    return PropertyResult(f"quadrature error decays by 2^{2 * n} per halving "
                          f"(n = {n})", worst, 1.0)
