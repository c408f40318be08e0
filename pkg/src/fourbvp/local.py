"""Single-subinterval solves of the second-kind integral equation.

Everything here lives in the subinterval's own [-1, 1] coordinates; the
driver applies the (2/h)^j conversions when gluing subintervals together.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List

import numpy as np

from .greens import green_branch, psi_alpha, split_kernel
from .linalg import TruncatedFactor, qr_factor
from .quadrature import gauss_rule, partial_power_tables

_ZERO_ALPHA = np.zeros(4)


@lru_cache(maxsize=None)
def kernel_matrices(n):
    """Product-integration matrices of the kernels on [-1, 1].

    Returns (gmat, left, right): gmat[j] maps node values of sigma to the
    exact integrals int G_j(y_v, t) sigma(t) dt of its degree-(n-1)
    interpolant (split at the diagonal kink, so no quadrature error is
    committed across it); left[j]/right[j] are the corresponding rows for the
    evaluation points -1 and +1.  left[0], left[1], right[0], right[1] vanish
    identically by the boundary properties of the kernel.
    """
    rule = gauss_rule(n)
    y, w = rule.nodes, rule.weights
    qt, pt = partial_power_tables(n)
    gmat = np.zeros((4, n, n))
    for j in range(4):
        kern = split_kernel(j)
        for i in range(4 - j):
            block = np.zeros((n, n))
            for d in range(4):
                block += kern.q_table[i, d] * qt[d] + kern.p_table[i, d] * pt[d]
            gmat[j] += (y ** i)[:, None] * block
    left = np.stack([green_branch(j, -1.0, y, 'p') * w for j in range(4)])
    right = np.stack([green_branch(j, 1.0, y, 'q') * w for j in range(4)])
    return gmat, left, right


@dataclass
class LocalSystem:
    """Factored discretization of sigma + sum_j a_j G_j sigma = f on one
    subinterval (coefficients already normalized and rescaled)."""

    index: int
    coeff_tables: np.ndarray  # (4, n): a_0..a_3 at the local nodes
    matrix: np.ndarray        # (n, n)
    factor: object            # DenseFactor, or TruncatedFactor when the
                              # system is singular to working precision
    row_scale: np.ndarray     # (n,)


@dataclass
class LocalSolution:
    """sigma and the recovered solution values on one subinterval."""

    sigma: np.ndarray    # (n,)
    values: np.ndarray   # (5, n): phi^(0..4) at the local nodes
    left: np.ndarray     # (4,): phi^(0..3) at -1
    right: np.ndarray    # (4,): phi^(0..3) at +1


@dataclass
class HomogeneousBasis:
    """Four null-space solutions with cardinal value/slope boundary data."""

    solutions: List[LocalSolution]

    def boundary_matrix(self):
        """(4, 4) table of (value_l, value_r, slope_l, slope_r) per member."""
        out = np.empty((4, 4))
        for jb, sol in enumerate(self.solutions):
            out[jb] = (sol.left[0], sol.right[0], sol.left[1], sol.right[1])
        return out


def assemble_local(coeff_tables, rule, index=0):
    """Build and QR-factor the local system matrix.

    The integral term is discretized by product integration of the split
    kernels against the degree-(n-1) interpolant; with all coefficients zero
    the matrix is exactly the identity.  Rows are equilibrated before
    factoring (coefficients with a near-singular leading term scale whole
    rows by many orders of magnitude), and only an underflow-level guard is
    applied: genuinely ill-conditioned subintervals must still factor, with
    the deferred-corrections loop absorbing the damage.
    """
    coeff_tables = np.asarray(coeff_tables, dtype=float)
    gmat, _, _ = kernel_matrices(rule.n)
    a = np.eye(rule.n)
    for j in range(4):
        a = a + coeff_tables[j][:, None] * gmat[j]
    row_scale = np.max(np.abs(a), axis=1)
    equilibrated = a / row_scale[:, None]
    factor = qr_factor(equilibrated, rtol=1e-40)
    diag = np.abs(np.diag(factor.r))
    if np.min(diag) < 1e-12 * np.max(diag):
        # singular to working precision even after equilibration (leading
        # coefficient with a root at the edge); drop the null directions so
        # the sweep stays bounded instead of amplifying roundoff
        factor = TruncatedFactor(equilibrated)
    return LocalSystem(index, coeff_tables, a, factor, row_scale)


def solve_local(system, f_values, alpha=_ZERO_ALPHA):
    """Solve for sigma and recover phi^(0..4) and the endpoint data.

    alpha is the local boundary data; the cubic psi_alpha is removed from the
    right-hand side analytically (L psi_alpha = sum_j a_j psi_alpha^(j)) and
    added back to the recovered derivatives.
    """
    n = system.matrix.shape[0]
    gmat, left_rows, right_rows = kernel_matrices(n)
    rule = gauss_rule(n)
    f_alpha = np.asarray(f_values, dtype=float)
    has_alpha = np.any(np.asarray(alpha) != 0.0)
    if has_alpha:
        psi = np.stack([psi_alpha(alpha, rule.nodes, j) for j in range(4)])
        f_alpha = f_alpha - np.einsum('jn,jn->n', system.coeff_tables, psi)
    sigma = system.factor.solve(f_alpha / system.row_scale)
    values = np.empty((5, n))
    left = np.empty(4)
    right = np.empty(4)
    for j in range(4):
        values[j] = gmat[j] @ sigma
        left[j] = left_rows[j] @ sigma
        right[j] = right_rows[j] @ sigma
    values[4] = sigma
    if has_alpha:
        values[:4] += psi
        left += [psi_alpha(alpha, -1.0, j) for j in range(4)]
        right += [psi_alpha(alpha, 1.0, j) for j in range(4)]
    return LocalSolution(sigma, values, left, right)


def homogeneous_basis(system, derivative_scale=1.0):
    """Solve L g = 0 four times with cardinal boundary data.

    derivative_scale converts a unit slope in the unrescaled subinterval
    coordinates into local coordinates (h/2 for a subinterval of width h), so
    the cardinal conditions hold where the matching step imposes them.
    """
    n = system.matrix.shape[0]
    zero_f = np.zeros(n)
    sols = []
    for jb in range(4):
        alpha = np.zeros(4)
        alpha[jb] = 1.0 if jb < 2 else derivative_scale
        sols.append(solve_local(system, zero_f, alpha))
    return HomogeneousBasis(sols)
