"""Legendre polynomials, Gauss-Legendre rules, and values<->coefficients maps."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_EPS = np.finfo(float).eps
_NEWTON_CAP = 100


def legendre_eval(n_max, x):
    """Values P_0(x), ..., P_{n_max}(x) by the three-term recurrence.

    `x` may be a scalar or an array; the leading axis of the result indexes
    the polynomial degree.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    x = np.asarray(x, dtype=float)
    out = np.zeros((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


@dataclass
class GaussRule:
    """Gauss-Legendre rule on [-1, 1]: increasing nodes, positive weights."""

    n: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def gauss_rule(n):
    """n-point Gauss-Legendre rule, nodes by Newton from Chebyshev guesses."""
    if n < 1:
        raise ValueError("rule order must be >= 1")
    if n == 1:
        return GaussRule(1, np.zeros(1), np.full(1, 2.0))
    k = np.arange(1, n + 1)
    y = -np.cos(np.pi * (4 * k - 1) / (4 * n + 2))
    for it in range(_NEWTON_CAP):
        p = legendre_eval(n, y)
        dp = n * (y * p[n] - p[n - 1]) / (y * y - 1.0)
        dy = p[n] / dp
        y -= dy
        if np.max(np.abs(dy)) <= 4 * _EPS:
            break
    else:
        raise RuntimeError("Newton iteration for Gauss-Legendre nodes did not converge")
    p = legendre_eval(n, y)
    dp = n * (y * p[n] - p[n - 1]) / (y * y - 1.0)
    w = 2.0 / ((1.0 - y * y) * dp * dp)
    # enforce the exact symmetries of the rule
    y = 0.5 * (y - y[::-1])
    w = 0.5 * (w + w[::-1])
    if n % 2 == 1:
        y[n // 2] = 0.0
    return GaussRule(n, y, w)


def integrate_on(rule, interval, samples):
    """Integral over [a, b] from samples of f at the rescaled nodes."""
    a, b = interval
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != rule.n:
        raise ValueError("sample count does not match the rule order")
    return 0.5 * (b - a) * samples @ rule.weights


@dataclass
class LegendreTransform:
    """Maps between node values and the first n Legendre coefficients.

    to_coeffs[i, j] = (2i+1)/2 * P_i(y_j) w_j; to_values is its inverse
    (evaluation of the expansion at the nodes).  The two compose to the
    identity because the discrete orthogonality of P_0..P_{n-1} on the
    n-point rule is exact.
    """

    n: int
    to_coeffs: np.ndarray
    to_values: np.ndarray


@lru_cache(maxsize=None)
def legendre_transform(n):
    rule = gauss_rule(n)
    p = legendre_eval(n - 1, rule.nodes)  # (n, n): p[i, j] = P_i(y_j)
    to_coeffs = (0.5 * (2 * np.arange(n) + 1))[:, None] * p * rule.weights[None, :]
    return LegendreTransform(n, to_coeffs, p.T.copy())


def values_to_coeffs(rule, samples):
    """First n Legendre coefficients of f from its values at the n nodes."""
    return legendre_transform(rule.n).to_coeffs @ np.asarray(samples, dtype=float)


def coeffs_to_values(rule, coeffs):
    """Values of the expansion at the n nodes (inverse of values_to_coeffs)."""
    return legendre_transform(rule.n).to_values @ np.asarray(coeffs, dtype=float)


def eval_expansion(coeffs, x):
    """Evaluate sum_i c_i P_i(x) at x in [-1, 1] (scalar or array)."""
    coeffs = np.asarray(coeffs, dtype=float)
    p = legendre_eval(len(coeffs) - 1, x)
    return np.tensordot(coeffs, p, axes=(0, 0))


def antiderivative_coeffs(coeffs):
    """Coefficients of the primitive of the expansion that vanishes at -1.

    Uses int P_k = (P_{k+1} - P_{k-1}) / (2k+1); the constant mode is fixed
    from P_i(-1) = (-1)^i.
    """
    c = np.asarray(coeffs, dtype=float)
    n = len(c)
    b = np.zeros(n + 1)
    b[1] += c[0]
    for k in range(1, n):
        b[k + 1] += c[k] / (2 * k + 1)
        b[k - 1] -= c[k] / (2 * k + 1)
    signs = (-1.0) ** np.arange(1, n + 1)
    b[0] = -np.dot(b[1:], signs)
    return b


@lru_cache(maxsize=None)
def partial_power_tables(n):
    """Partial-integration tables for the monomial kernels t^d, d = 0..3.

    Q[d, v, :] maps samples of f at the n Gauss nodes to
    int_{-1}^{y_v} t^d f(t) dt, with f identified with its degree-(n-1)
    interpolant; P[d, v, :] maps to int_{y_v}^{1} t^d f(t) dt.  Each partial
    integral is computed with an n-point sub-rule, which is exact here since
    the integrands have degree <= n + 2 <= 2n - 1 for n >= 3.
    """
    rule = gauss_rule(n)
    y, w = rule.nodes, rule.weights
    to_coeffs = legendre_transform(n).to_coeffs
    # sub-rule nodes/weights on [-1, y_v] and [y_v, 1]
    sl = -1.0 + (y[:, None] + 1.0) * (y[None, :] + 1.0) / 2.0
    wl = (y[:, None] + 1.0) / 2.0 * w[None, :]
    sr = y[:, None] + (1.0 - y[:, None]) * (y[None, :] + 1.0) / 2.0
    wr = (1.0 - y[:, None]) / 2.0 * w[None, :]
    # el[v, u, u'] = value of the u'-th cardinal interpolant at sl[v, u]
    el = np.einsum('cvu,cU->vuU', legendre_eval(n - 1, sl), to_coeffs)
    er = np.einsum('cvu,cU->vuU', legendre_eval(n - 1, sr), to_coeffs)
    q = np.empty((4, n, n))
    p = np.empty((4, n, n))
    for d in range(4):
        q[d] = np.einsum('vu,vu,vuU->vU', sl ** d, wl, el)
        p[d] = np.einsum('vu,vu,vuU->vU', sr ** d, wr, er)
    return q, p
