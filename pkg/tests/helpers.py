"""Shared test oracles, kept independent of the production fast paths.

The dense operators here are built directly from the branch formulas with
oversampled split quadrature (exact for the polynomial integrands involved),
so they validate the prefix-sum/partial-table machinery without reusing it.
"""

import numpy as np

from fourbvp.greens import green_branch
from fourbvp.quadrature import gauss_rule, legendre_eval, legendre_transform


def cardinal_values(n, s):
    """(len(s), n) values of the n Lagrange cardinal interpolants at s."""
    transform = legendre_transform(n)
    p = legendre_eval(n - 1, np.atleast_1d(np.asarray(s, dtype=float)))
    return np.einsum('cs,cU->sU', p, transform.to_coeffs)


def local_split_matrix(n, j, oversample=4):
    """(n, n) product-integration matrix of G_j on [-1, 1] by oversampled
    quadrature split at the diagonal kink."""
    rule = gauss_rule(n)
    quad = gauss_rule(oversample * n + 8)
    out = np.zeros((n, n))
    for v, yv in enumerate(rule.nodes):
        row = np.zeros(n)
        if yv > -1.0:
            s = -1.0 + (yv + 1.0) * (quad.nodes + 1.0) / 2.0
            w = (yv + 1.0) / 2.0 * quad.weights
            row += (green_branch(j, yv, s, 'q') * w) @ cardinal_values(n, s)
        if yv < 1.0:
            s = yv + (1.0 - yv) * (quad.nodes + 1.0) / 2.0
            w = (1.0 - yv) / 2.0 * quad.weights
            row += (green_branch(j, yv, s, 'p') * w) @ cardinal_values(n, s)
        out[v] = row
    return out


def dense_split_operator(mesh, j, oversample=4):
    """(mn, mn) matrix of sigma node values -> exact integrals of G_j against
    sigma's per-subinterval interpolant, at all global nodes."""
    m, n = mesh.m, mesh.n
    quad = gauss_rule(oversample * n + 8)
    mids = mesh.midpoints
    hw = 0.5 * mesh.width
    out = np.zeros((m * n, m * n))
    for k in range(m):
        x = mesh.nodes[k]
        for l in range(m):
            if l == k:
                continue
            branch = 'q' if l < k else 'p'
            block = green_branch(j, x[:, None], mesh.nodes[l][None, :], branch)
            out[k * n:(k + 1) * n, l * n:(l + 1) * n] = block * mesh.weights[l][None, :]
        rule = gauss_rule(n)
        for v in range(n):
            yv = rule.nodes[v]
            row = np.zeros(n)
            if yv > -1.0:
                s = -1.0 + (yv + 1.0) * (quad.nodes + 1.0) / 2.0
                w = hw * (yv + 1.0) / 2.0 * quad.weights
                t = mids[k] + hw * s
                row += (green_branch(j, x[v], t, 'q') * w) @ cardinal_values(n, s)
            if yv < 1.0:
                s = yv + (1.0 - yv) * (quad.nodes + 1.0) / 2.0
                w = hw * (1.0 - yv) / 2.0 * quad.weights
                t = mids[k] + hw * s
                row += (green_branch(j, x[v], t, 'p') * w) @ cardinal_values(n, s)
            out[k * n + v, k * n:(k + 1) * n] = row
    return out


def constant_field(value):
    return lambda x, value=value: np.full_like(np.asarray(x, dtype=float), value)


def zero_field(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def quartic_problem():
    """phi'''' = 24 with zero boundary data: solution (x^2 - 1)^2."""
    from fourbvp.problem import BVProblem
    coeffs = (zero_field, zero_field, zero_field, zero_field, constant_field(1.0))
    return BVProblem(coeffs, constant_field(24.0), (-1.0, 1.0))


def quartic_reference(x, k):
    x = np.asarray(x, dtype=float)
    table = [(x ** 2 - 1) ** 2, 4 * x ** 3 - 4 * x, 12 * x ** 2 - 4, 24 * x,
             np.full_like(x, 24.0)]
    return table[k]


def manufactured_reference(x, k, rate=1.0):
    """Derivatives of (x^2 - 1)^2 exp(rate * x)."""
    x = np.asarray(x, dtype=float)
    u = [(x ** 2 - 1) ** 2, 4 * x * (x ** 2 - 1), 12 * x ** 2 - 4, 24 * x,
         np.full_like(x, 24.0)]
    from math import comb
    acc = np.zeros_like(x)
    for i in range(k + 1):
        acc = acc + comb(k, i) * u[i] * rate ** (k - i)
    return acc * np.exp(rate * x)


def polyfreq_coeffs():
    """The variable-coefficient family a_j(x) = 1 + x^(4-j)."""
    return tuple((lambda x, j=j: 1.0 + np.asarray(x, dtype=float) ** (4 - j))
                 for j in range(5))
