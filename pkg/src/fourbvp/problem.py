"""Problem definition, affine rescaling to [-1, 1], leading-coefficient
normalization, and mesh construction."""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .quadrature import GaussRule, gauss_rule


class ZeroLeadingCoefficientError(ValueError):
    """The leading coefficient vanishes at a quadrature node."""


@dataclass
class BVProblem:
    """Fourth-order linear boundary value problem on [a, b].

    coefficients holds the scalar fields (a_0, ..., a_4); alpha is the
    boundary data (value at a, value at b, slope at a, slope at b).
    """

    coefficients: Sequence[Callable]
    f: Callable
    interval: tuple
    alpha: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.coefficients) != 5:
            raise ValueError("expected five coefficient fields a_0..a_4")
        if len(self.alpha) != 4:
            raise ValueError("expected four boundary values")


@dataclass
class GeneralBC:
    """Boundary functional  sum_k lw[k] phi^(k)(a) + rw[k] phi^(k)(b) = target
    with weights over derivatives 0..3."""

    left_weights: Sequence[float] = (0.0, 0.0, 0.0, 0.0)
    right_weights: Sequence[float] = (0.0, 0.0, 0.0, 0.0)
    target: float = 0.0


def to_unit(x, interval):
    """Map x in [a, b] to y in [-1, 1]."""
    a, b = interval
    return 2.0 * (np.asarray(x, dtype=float) - a) / (b - a) - 1.0


def from_unit(y, interval):
    """Map y in [-1, 1] to x in [a, b]."""
    a, b = interval
    return 0.5 * (b - a) * (np.asarray(y, dtype=float) + 1.0) + a


def rescale_problem(p):
    """Equivalent problem on [-1, 1]: coefficients pick up (2/(b-a))^j, the
    slope boundary data picks up (b-a)/2."""
    a, b = p.interval
    if not b > a:
        raise ValueError("degenerate interval: need b > a")
    s = 2.0 / (b - a)

    def wrap(g, j):
        return lambda y, g=g, j=j: s ** j * np.asarray(g(from_unit(y, (a, b))), dtype=float)

    coeffs = tuple(wrap(p.coefficients[j], j) for j in range(5))
    rhs = lambda y: np.asarray(p.f(from_unit(y, (a, b))), dtype=float)
    al0, ar0, al1, ar1 = p.alpha
    alpha = (al0, ar0, al1 / s, ar1 / s)
    return BVProblem(coeffs, rhs, (-1.0, 1.0), alpha)


def inverse_rescale_derivatives(values, j, interval):
    """Values of phi^(j) on [a, b] from values of the rescaled solution's
    j-th derivative at the mapped points."""
    if not 0 <= j <= 4:
        raise ValueError("derivative order must be in 0..4")
    a, b = interval
    return (2.0 / (b - a)) ** j * np.asarray(values, dtype=float)


def normalize_leading(p, nodes):
    """Sampled coefficient tables with the leading coefficient divided out.

    Returns (tables, f_table, a4_table) where tables[j] = a_j(nodes)/a_4(nodes)
    for j = 0..3.  Aborts if a_4 vanishes at any node.
    """
    nodes = np.asarray(nodes, dtype=float)
    a4 = np.broadcast_to(np.asarray(p.coefficients[4](nodes), dtype=float), nodes.shape).copy()
    bad = ~np.isfinite(a4) | (a4 == 0.0)
    if np.any(bad):
        where = nodes[bad].ravel()[0]
        raise ZeroLeadingCoefficientError(
            f"leading coefficient vanishes at node x = {where!r}")
    tables = np.empty((4,) + nodes.shape)
    for j in range(4):
        tables[j] = np.broadcast_to(np.asarray(p.coefficients[j](nodes), dtype=float),
                                    nodes.shape) / a4
    f_table = np.broadcast_to(np.asarray(p.f(nodes), dtype=float), nodes.shape) / a4
    return tables, f_table, a4


@dataclass
class Mesh:
    """m uniform subintervals of [-1, 1] with n Gauss nodes in each."""

    m: int
    n: int
    breakpoints: np.ndarray  # (m + 1,)
    nodes: np.ndarray        # (m, n), strictly increasing when flattened
    weights: np.ndarray      # (m, n)
    rule: GaussRule = field(repr=False, default=None)

    @property
    def midpoints(self):
        return 0.5 * (self.breakpoints[:-1] + self.breakpoints[1:])

    @property
    def width(self):
        return 2.0 / self.m


def build_mesh(m, n):
    """Uniform mesh with breakpoints x_i = -1 + 2(i-1)/m and per-subinterval
    Gauss-Legendre nodes."""
    if m < 1:
        raise ValueError("need at least one subinterval")
    if n < 1:
        raise ValueError("need at least one node per subinterval")
    rule = gauss_rule(n)
    breakpoints = -1.0 + 2.0 * np.arange(m + 1) / m
    mids = 0.5 * (breakpoints[:-1] + breakpoints[1:])
    h = 2.0 / m
    nodes = mids[:, None] + 0.5 * h * rule.nodes[None, :]
    weights = np.tile(0.5 * h * rule.weights, (m, 1))
    return Mesh(m, n, breakpoints, nodes, weights, rule)
