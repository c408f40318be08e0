"""The 4m-by-4m banded system gluing local solutions into a C^3 function.

Unknown ordering is beta_{1,1}..beta_{1,4}, ..., beta_{m,1}..beta_{m,4},
where beta_{i,1}/beta_{i,2} multiply the value cardinals at the left/right
endpoint of subinterval i and beta_{i,3}/beta_{i,4} the slope cardinals.
Equations are ordered left endpoint (value, slope), then per interface
(value match, 2nd-derivative match, 3rd-derivative match, 1st-derivative
match), then right endpoint (value, slope); this realizes a 9-diagonal band.

All boundary data passed in must be in global (unrescaled) coordinates.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import BandedLU, BandedMatrix, SingularMatrixError, banded_factor_solve

BAND_LOWER = 4
BAND_UPPER = 4


class MatchingError(RuntimeError):
    """Matching failed: homogeneous boundary data are linearly dependent."""


@dataclass
class MatchingCoefficients:
    """beta_{i,j} laid out row-major, length 4m."""

    beta: np.ndarray

    def per_subinterval(self):
        return self.beta.reshape(-1, 4)


def matching_matrix(basis_left, basis_right):
    """Banded matrix of the interface/endpoint equations.

    basis_left/basis_right have shape (m, 4, 4): boundary data (derivative
    orders 0..3) of the four homogeneous solutions at each subinterval's
    endpoints.  Value and slope matches use the cardinal structure of the
    basis directly (exact by construction), so only the second/third
    derivative rows carry dense coefficients.
    """
    m = basis_left.shape[0]
    mat = BandedMatrix.zeros(4 * m, BAND_LOWER, BAND_UPPER)
    mat.set_entries([0, 1], [0, 2], [1.0, 1.0])
    mat.set_entries([4 * m - 2, 4 * m - 1], [4 * m - 3, 4 * m - 1], [1.0, 1.0])
    if m > 1:
        i = np.arange(m - 1)
        base = 2 + 4 * i
        # value and slope matches: beta_{i,2} - beta_{i+1,1}, beta_{i,4} - beta_{i+1,3}
        mat.set_entries(base, 4 * i + 1, np.ones(m - 1))
        mat.set_entries(base, 4 * i + 4, -np.ones(m - 1))
        mat.set_entries(base + 3, 4 * i + 3, np.ones(m - 1))
        mat.set_entries(base + 3, 4 * i + 6, -np.ones(m - 1))
        for jb in range(4):
            for k, row in ((2, base + 1), (3, base + 2)):
                mat.set_entries(row, 4 * i + jb, basis_right[:-1, jb, k])
                mat.set_entries(row, 4 * (i + 1) + jb, -basis_left[1:, jb, k])
    return mat


def matching_rhs(tilde_left, tilde_right, alpha):
    """Right-hand side of the matching system from the particular solutions'
    boundary data (shape (m, 4) each) and the global boundary values."""
    m = tilde_left.shape[0]
    rhs = np.empty(4 * m)
    rhs[0] = alpha[0] - tilde_left[0, 0]
    rhs[1] = alpha[2] - tilde_left[0, 1]
    if m > 1:
        base = 2 + 4 * np.arange(m - 1)
        for k, off in ((0, 0), (2, 1), (3, 2), (1, 3)):
            rhs[base + off] = tilde_left[1:, k] - tilde_right[:-1, k]
    rhs[4 * m - 2] = alpha[1] - tilde_right[m - 1, 0]
    rhs[4 * m - 1] = alpha[3] - tilde_right[m - 1, 1]
    return rhs


def assemble_matching(tilde_boundary, basis_boundary, alpha):
    """Banded matrix and right-hand side of the full matching system.

    tilde_boundary: (m, 2, 4) endpoint data of the particular solutions;
    basis_boundary: (m, 4, 2, 4) endpoint data of the homogeneous bases.
    """
    mat = matching_matrix(basis_boundary[:, :, 0, :], basis_boundary[:, :, 1, :])
    rhs = matching_rhs(tilde_boundary[:, 0, :], tilde_boundary[:, 1, :], alpha)
    return mat, rhs


def solve_matching(matrix, rhs):
    """Solve for the matching coefficients by banded LU."""
    try:
        beta = banded_factor_solve(matrix, rhs)
    except SingularMatrixError as exc:
        raise MatchingError("matching system is singular: homogeneous "
                            "solutions are linearly dependent") from exc
    return MatchingCoefficients(beta)


def factor_matching(matrix):
    """Reusable band factors (the matrix is fixed per factorization)."""
    try:
        return BandedLU(matrix)
    except SingularMatrixError as exc:
        raise MatchingError("matching system is singular: homogeneous "
                            "solutions are linearly dependent") from exc


def combine(tilde_values, basis_values, beta):
    """Per-subinterval linear combination phi_i = tilde_i + sum_j beta_ij g_ij.

    tilde_values: (5, m, n); basis_values: (m, 4, 5, n); beta: length 4m.
    Returns the combined (5, m, n) node values; slice [4] is the global sigma.
    """
    b = beta.beta if isinstance(beta, MatchingCoefficients) else np.asarray(beta)
    b = b.reshape(-1, 4)
    return tilde_values + np.einsum('kj,kjdn->dkn', b, basis_values)
