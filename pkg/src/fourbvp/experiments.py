"""Built-in experiment registry, the relative-error metric, the embedded
Bessel reference, and table/CSV emission."""

import csv
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

from .driver import SolverOptions, evaluate, factorize, solve, solve_general_bc
from .problem import BVProblem, GeneralBC

PROBLEM_IDS = ("sin5", "sin150", "beam-fixed", "beam-ss", "bessel")
DEFAULT_N = {"sin5": 10, "sin150": 15, "beam-fixed": 10, "beam-ss": 10, "bessel": 20}

# left endpoint of the Bessel experiment: sqrt of the smallest normal double
BESSEL_LEFT = math.sqrt(sys.float_info.min)


@dataclass
class ExperimentSpec:
    problem_id: str
    m_list: tuple
    n: int = 0

    def __post_init__(self):
        if self.problem_id not in PROBLEM_IDS:
            raise ValueError(f"unknown problem {self.problem_id!r}")
        if self.n <= 0:
            self.n = DEFAULT_N[self.problem_id]


@dataclass
class ExperimentRow:
    m: int
    errors: tuple            # R(phi^(0)) .. R(phi^(4))
    factor_time: float
    solve_time: float
    residuals: tuple
    failed: bool = False
    message: str = ""

    @property
    def total_time(self):
        return self.factor_time + self.solve_time


@dataclass
class ErrorReport:
    problem_id: str
    n: int
    rows: List[ExperimentRow] = field(default_factory=list)

    @property
    def failed(self):
        return any(row.failed for row in self.rows)


def relative_error_R(estimate, reference, interval, j, npoints=10000):
    """Root-mean-square relative error over an equispaced grid (endpoints
    included); evaluators take (x array, derivative order)."""
    a, b = interval
    grid = np.linspace(a, b, npoints)
    est = np.asarray(estimate(grid, j), dtype=float)
    ref = np.asarray(reference(grid, j), dtype=float)
    denom = np.sum(ref * ref)
    if denom == 0.0:
        raise ZeroDivisionError("reference is identically zero on the grid")
    return float(np.sqrt(np.sum((est - ref) ** 2) / denom))


# -- Bessel reference -------------------------------------------------------

def bessel_j_array(x, kmax):
    """J_0(x)..J_kmax(x) by Miller's downward recurrence with the
    normalization identity J_0 + 2 sum J_2k = 1; rescaled on the fly so the
    unnormalized recurrence cannot overflow."""
    if x <= 0:
        raise ValueError("need x > 0")
    start = int(x + 10.0 * math.sqrt(x + 1.0) + 40.0)
    start = max(start + start % 2, kmax + 20)
    jp = 0.0   # J_{k+1}, unnormalized
    jc = 1e-30  # J_k
    out = np.zeros(kmax + 1)
    norm = 0.0
    for k in range(start, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp, jc = jc, jm
        if k - 1 <= kmax:
            out[k - 1] = jc
        if (k - 1) % 2 == 0:
            norm += jc if k == 1 else 2.0 * jc
        # 2k/x can reach ~1e156 near the smallest admissible x, so rescale
        # until one further step cannot overflow
        while abs(jc) > 1e120:
            jp *= 1e-120
            jc *= 1e-120
            norm *= 1e-120
            out *= 1e-120
    return out / norm


def bessel_reference(x, order=10):
    """(J_order(x), J_order'(x)) with the derivative from the neighbor
    identity J' = (J_{order-1} - J_{order+1}) / 2."""
    j = bessel_j_array(x, order + 1)
    return j[order], 0.5 * (j[order - 1] - j[order + 1])


def bessel_derivative(x, deriv, order=10):
    """deriv-th derivative of J_order at x (deriv <= 4), by repeated
    application of the neighbor identity."""
    j = bessel_j_array(x, order + deriv)
    coeffs = {order: 1.0}
    for _ in range(deriv):
        step = {}
        for nu, c in coeffs.items():
            step[nu - 1] = step.get(nu - 1, 0.0) + 0.5 * c
            step[nu + 1] = step.get(nu + 1, 0.0) - 0.5 * c
        coeffs = step
    return sum(c * (j[abs(nu)] if nu >= 0 else (-1) ** (-nu) * j[-nu])
               for nu, c in coeffs.items())


# -- problem registry -------------------------------------------------------

def _sin_problem(freq):
    coeffs = tuple((lambda x, j=j: 1.0 + np.asarray(x, dtype=float) ** (4 - j))
                   for j in range(5))

    def f(x):
        x = np.asarray(x, dtype=float)
        return sum((1.0 + x ** (4 - j)) * freq ** j * np.sin(freq * x + 0.5 * j * np.pi)
                   for j in range(5))

    problem = BVProblem(coeffs, f, (0.0, 2.0 * np.pi), (0.0, 0.0, freq, freq))

    def reference(x, j):
        x = np.asarray(x, dtype=float)
        return freq ** j * np.sin(freq * x + 0.5 * j * np.pi)

    return problem, reference


def _beam_problem():
    coeffs = (
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
        lambda x: 4.0 * (np.asarray(x, dtype=float) - 0.5),
        lambda x: (np.asarray(x, dtype=float) - 0.5) ** 2 + 1.0,
    )
    f = lambda x: np.sin(2.0 * np.pi * np.asarray(x, dtype=float)) + 1.0
    return BVProblem(coeffs, f, (0.0, 1.0), (0.0, 0.0, 0.0, 0.0))


def _bessel_problem():
    coeffs = (
        lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
        lambda x: 4.0 * np.asarray(x, dtype=float),
        lambda x: np.asarray(x, dtype=float) ** 2 - 96.0,
        lambda x: 5.0 * np.asarray(x, dtype=float),
        lambda x: np.asarray(x, dtype=float) ** 2,
    )
    f = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    jr, jr_prime = bessel_reference(100.0)
    # J_10 and J_10' are far below double precision at the left endpoint
    problem = BVProblem(coeffs, f, (BESSEL_LEFT, 100.0), (0.0, jr, 0.0, jr_prime))

    def reference(x, j):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([bessel_derivative(xi, j) for xi in x])

    return problem, reference


SIMPLY_SUPPORTED_BCS = (
    GeneralBC(left_weights=(1.0, 0.0, 0.0, 0.0)),
    GeneralBC(right_weights=(1.0, 0.0, 0.0, 0.0)),
    GeneralBC(left_weights=(0.0, 0.0, 1.0, 0.0)),
    GeneralBC(right_weights=(0.0, 0.0, 1.0, 0.0)),
)


def build_problem(problem_id):
    """(BVProblem, reference) for a registry id; reference is None when the
    experiment measures self-convergence (the beams)."""
    if problem_id == "sin5":
        return _sin_problem(5.0)
    if problem_id == "sin150":
        return _sin_problem(150.0)
    if problem_id in ("beam-fixed", "beam-ss"):
        return _beam_problem(), None
    if problem_id == "bessel":
        return _bessel_problem()
    raise ValueError(f"unknown problem {problem_id!r}")


def run_experiment(spec, output_dir=None, max_iterations=None, target=None,
                   eval_grid=10000, figures=True):
    """Run one experiment over its m list; returns the ErrorReport and, when
    output_dir is given, writes the CSV files (plus figures) there."""
    problem, reference = build_problem(spec.problem_id)
    report = ErrorReport(spec.problem_id, spec.n)
    solutions = {}
    for m in spec.m_list:
        try:
            opts = SolverOptions(m, spec.n)
            if max_iterations is not None:
                opts.max_iterations = max_iterations
            if target is not None:
                opts.target_residual = target
            t0 = time.perf_counter()
            fact = factorize(problem, opts)
            t1 = time.perf_counter()
            if spec.problem_id == "beam-ss":
                sol = solve_general_bc(fact, problem.f, SIMPLY_SUPPORTED_BCS)
                _, log = solve(fact, problem.f, (0.0, 0.0, 0.0, 0.0))
            else:
                sol, log = solve(fact)
            t2 = time.perf_counter()
        except Exception as exc:  # noqa: BLE001 - row failure, run continues
            report.rows.append(ExperimentRow(m, (np.nan,) * 5, 0.0, 0.0, (),
                                             failed=True, message=str(exc)))
            continue
        solutions[m] = sol
        ref = reference
        if ref is None:
            # self-convergence: measure against the 2m solution
            fine_opts = SolverOptions(2 * m, spec.n)
            fine_fact = factorize(problem, fine_opts)
            if spec.problem_id == "beam-ss":
                fine = solve_general_bc(fine_fact, problem.f, SIMPLY_SUPPORTED_BCS)
            else:
                fine, _ = solve(fine_fact)
            ref = lambda x, j, fine=fine: evaluate(fine, x, j)
        est = lambda x, j, sol=sol: evaluate(sol, x, j)
        errors = tuple(relative_error_R(est, ref, problem.interval, j, eval_grid)
                       for j in range(5))
        report.rows.append(ExperimentRow(m, errors, t1 - t0, t2 - t1, tuple(log)))
    if output_dir is not None:
        write_report_csv(report, output_dir)
        if figures:
            from . import plots
            plots.render_report_figures(report, solutions, problem, reference,
                                        output_dir)
    return report


# -- CSV emission -----------------------------------------------------------

def _fmt(x):
    return format(float(x), ".16e")


def write_report_csv(report, output_dir):
    """One errors file, one timings file, one residuals file (long format)."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = report.problem_id
    with open(out / f"{base}_errors.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "R0", "R1", "R2", "R3", "R4"])
        for row in report.rows:
            writer.writerow([row.m] + [_fmt(e) for e in row.errors])
    with open(out / f"{base}_timings.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "t_factor", "t_solve", "t_total"])
        for row in report.rows:
            writer.writerow([row.m, _fmt(row.factor_time), _fmt(row.solve_time),
                             _fmt(row.total_time)])
    with open(out / f"{base}_residuals.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "iteration", "residual"])
        for row in report.rows:
            for it, res in enumerate(row.residuals, start=1):
                writer.writerow([row.m, it, _fmt(res)])
    return out


def read_report_csv(problem_id, output_dir):
    """Parse the emitted CSV files back into an ErrorReport (timings and
    residuals included; n is not stored in the files)."""
    out = Path(output_dir)
    residuals = {}
    with open(out / f"{problem_id}_residuals.csv", newline="") as fh:
        for rec in csv.DictReader(fh):
            residuals.setdefault(int(rec["m"]), []).append(float(rec["residual"]))
    timings = {}
    with open(out / f"{problem_id}_timings.csv", newline="") as fh:
        for rec in csv.DictReader(fh):
            timings[int(rec["m"])] = (float(rec["t_factor"]), float(rec["t_solve"]))
    report = ErrorReport(problem_id, 0)
    with open(out / f"{problem_id}_errors.csv", newline="") as fh:
        for rec in csv.DictReader(fh):
            m = int(rec["m"])
            errors = tuple(float(rec[f"R{j}"]) for j in range(5))
            t_factor, t_solve = timings[m]
            report.rows.append(ExperimentRow(m, errors, t_factor, t_solve,
                                             tuple(residuals.get(m, ()))))
    return report


# -- text tables ------------------------------------------------------------

def format_report(report):
    lines = [f"problem {report.problem_id}, n = {report.n} nodes per subinterval", ""]
    header = f"{'m':>6} " + " ".join(f"{f'R(phi^{j})':>12}" for j in range(5))
    lines.append(header)
    for row in report.rows:
        if row.failed:
            lines.append(f"{row.m:>6} FAILED: {row.message}")
            continue
        lines.append(f"{row.m:>6} " + " ".join(f"{e:>12.4E}" for e in row.errors))
    lines.append("")
    lines.append(f"{'m':>6} {'factor (s)':>12} {'solve (s)':>12} {'total (s)':>12}")
    for row in report.rows:
        if row.failed:
            continue
        lines.append(f"{row.m:>6} {row.factor_time:>12.4E} {row.solve_time:>12.4E} "
                     f"{row.total_time:>12.4E}")
    lines.append("")
    lines.append(f"{'m':>6}  residuals per iteration")
    for row in report.rows:
        if row.failed:
            continue
        lines.append(f"{row.m:>6}  " + " ".join(f"{r:.4E}" for r in row.residuals))
    return "\n".join(lines)
