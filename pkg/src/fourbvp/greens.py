"""Biharmonic Green's function on [-1, 1], its x-derivative kernels, the
split polynomial form, and the boundary cubic family."""

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

# x-power expansion of the kernel on each branch: G_0(x, t) = sum_i x^i q_i(t)
# for t < x and sum_i x^i p_i(t) for t > x.  Row i holds the monomial
# coefficients (in t, low to high) of q_i / p_i.
Q_TABLE = np.array([
    [1.0, 0.0, -3.0, -2.0],
    [0.0, 3.0, 6.0, 3.0],
    [-3.0, -6.0, -3.0, 0.0],
    [2.0, 3.0, 0.0, -1.0],
]) / 24.0
P_TABLE = np.array([
    [1.0, 0.0, -3.0, 2.0],
    [0.0, 3.0, -6.0, 3.0],
    [-3.0, 6.0, -3.0, 0.0],
    [-2.0, 3.0, 0.0, -1.0],
]) / 24.0

# boundary cubics (monomial coefficients, low to high), one row per
# psi_{l,0}, psi_{r,0}, psi_{l,1}, psi_{r,1}
PSI_COEFFS = np.array([
    [2.0, -3.0, 0.0, 1.0],
    [2.0, 3.0, 0.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
    [-1.0, -1.0, 1.0, 1.0],
]) / 4.0


def green_branch(j, x, t, branch):
    """j-th x-derivative of the product-form kernel on one branch.

    branch 'q' is the t < x formula, 'p' the t > x formula; either one may be
    evaluated anywhere (they are polynomials).
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if branch == 'q':
        u = 1.0 + 2.0 * x - 2.0 * t - t * x
        if j == 0:
            return (1 - x) ** 2 * (1 + t) ** 2 * u / 24.0
        if j == 1:
            return (1 + t) ** 2 * ((1 - x) ** 2 * (2 - t) - 2 * (1 - x) * u) / 24.0
        if j == 2:
            return (1 + t) ** 2 * (2 * u - 4 * (1 - x) * (2 - t)) / 24.0
        if j == 3:
            return (1 + t) ** 2 * (2 - t) / 4.0 + 0.0 * x
    elif branch == 'p':
        u = 1.0 + 2.0 * t - 2.0 * x - t * x
        if j == 0:
            return (1 - t) ** 2 * (1 + x) ** 2 * u / 24.0
        if j == 1:
            return (1 - t) ** 2 * (2 * (1 + x) * u - (1 + x) ** 2 * (2 + t)) / 24.0
        if j == 2:
            return (1 - t) ** 2 * (2 * u - 4 * (1 + x) * (2 + t)) / 24.0
        if j == 3:
            return -(1 - t) ** 2 * (2 + t) / 4.0 + 0.0 * x
    else:
        raise ValueError("branch must be 'q' or 'p'")
    raise ValueError("derivative order must be in 0..3")


def green_eval(j, x, t):
    """G_j(x, t) with the branch selected by the sign of t - x.

    At t == x the t < x branch is returned (only j = 3 is discontinuous
    there).  Scalars or broadcastable arrays.
    """
    q = green_branch(j, x, t, 'q')
    p = green_branch(j, x, t, 'p')
    return np.where(np.asarray(t) > np.asarray(x), p, q)


@dataclass
class SplitKernel:
    """Split polynomial form of G_j: rows of q_table/p_table hold the
    t-monomial coefficients of the polynomial multiplying x^i."""

    j: int
    q_table: np.ndarray  # (4 - j, 4)
    p_table: np.ndarray

    def evaluate(self, x, t, branch):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        table = self.q_table if branch == 'q' else self.p_table
        tpow = np.stack([t ** d for d in range(4)])
        polys = np.tensordot(table, tpow, axes=(1, 0))  # (4-j, ...)
        out = np.zeros(np.broadcast(x, t).shape)
        for i in range(table.shape[0]):
            out = out + x ** i * polys[i]
        return out


@lru_cache(maxsize=None)
def split_kernel(j):
    """Split tables for G_j, obtained by differentiating the x-expansion:
    the x^i coefficient of G_j is (i+j)!/i! times row i+j of the G_0 table."""
    if j not in (0, 1, 2, 3):
        raise ValueError("derivative order must be in 0..3")
    rows = 4 - j
    q = np.empty((rows, 4))
    p = np.empty((rows, 4))
    for i in range(rows):
        fac = factorial(i + j) / factorial(i)
        q[i] = fac * Q_TABLE[i + j]
        p[i] = fac * P_TABLE[i + j]
    return SplitKernel(j, q, p)


def cubic_eval(coeffs, x, deriv=0):
    """Derivative of a monomial cubic; coeffs are low-to-high, deriv <= 4."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for pw in range(deriv, 4):
        fac = 1.0
        for q in range(pw, pw - deriv, -1):
            fac *= q
        out = out + coeffs[pw] * fac * x ** (pw - deriv)
    return out


def psi_cubic(index, x, deriv=0):
    """One of the four boundary cubics (0: l-value, 1: r-value, 2: l-slope,
    3: r-slope) or a derivative of it."""
    return cubic_eval(PSI_COEFFS[index], x, deriv)


def psi_alpha(alpha, x, deriv=0):
    """The cubic with boundary data alpha = (a_l0, a_r0, a_l1, a_r1), or its
    deriv-th derivative, at x."""
    coeffs = PSI_COEFFS.T @ np.asarray(alpha, dtype=float)
    return cubic_eval(coeffs, x, deriv)
