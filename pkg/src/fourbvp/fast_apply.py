"""Application of the global kernels G_j (and of L G_0) to node-sampled
functions in O(m n^2) operations.

The split form G_j(x, t) = sum_i x^i q_i(t) / p_i(t) reduces everything to
per-subinterval integrals of cubic polynomials against sigma's local
degree-(n-1) interpolant: full-subinterval integrals feed two prefix sums,
and the within-subinterval partial integrals reuse the monomial-kernel
tables (the branch cubics are re-expanded around each subinterval's
midpoint, so the per-subinterval data are just 4x4 coefficient arrays).
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .greens import P_TABLE, Q_TABLE, split_kernel
from .quadrature import partial_power_tables


@lru_cache(maxsize=None)
def _deriv_factor(i, j):
    # x^(i+j) differentiates j times to (i+j)!/i! x^i
    return factorial(i + j) / factorial(i)


def _recenter(table, mids, half_width):
    """Expand each monomial-in-t row of `table` in local coordinates
    t = c_k + (h/2) s; returns gamma[k, i, d] with s-powers d."""
    m = len(mids)
    gamma = np.zeros((m, 4, 4))
    for i in range(4):
        for d in range(4):
            acc = np.zeros(m)
            for e in range(d, 4):
                acc += table[i, e] * comb(e, d) * mids ** (e - d)
            gamma[:, i, d] = acc * half_width ** d
    return gamma


@dataclass
class PartialIntegralTables:
    """Precomputed data for the fast apply on a fixed mesh."""

    mesh: object
    qpart: np.ndarray    # (4, n, n) monomial-kernel partial tables, q side
    ppart: np.ndarray    # (4, n, n), p side
    gamma_q: np.ndarray  # (m, 4, 4) recentered branch-cubic coefficients
    gamma_p: np.ndarray
    wq: np.ndarray       # (4, m, n) full-subinterval rows q_i(t) * W
    wp: np.ndarray
    xpow: np.ndarray     # (4, m, n) powers of the global nodes

    # -- fast path -------------------------------------------------------

    def apply_all(self, sigma):
        """(G_0 sigma, ..., G_3 sigma) at all global nodes; sigma is (m, n)."""
        sigma = np.asarray(sigma, dtype=float)
        hw = 0.5 * self.mesh.width
        u_q = np.einsum('dvu,ku->dkv', self.qpart, sigma)
        u_p = np.einsum('dvu,ku->dkv', self.ppart, sigma)
        f_q = np.einsum('imu,mu->mi', self.wq, sigma)
        f_p = np.einsum('imu,mu->mi', self.wp, sigma)
        left = np.vstack([np.zeros(4), np.cumsum(f_q, axis=0)[:-1]])
        right = np.vstack([np.cumsum(f_p[::-1], axis=0)[-2::-1], np.zeros(4)])
        inner = (left[:, None, :] + right[:, None, :]
                 + hw * np.einsum('kid,dkv->kvi', self.gamma_q, u_q)
                 + hw * np.einsum('kid,dkv->kvi', self.gamma_p, u_p))
        out = np.zeros((4,) + sigma.shape)
        for j in range(4):
            for i in range(4 - j):
                out[j] += _deriv_factor(i, j) * self.xpow[i] * inner[:, :, i + j]
        return out

    def boundary_values(self, j, sigma):
        """(G_j sigma)(-1) and (G_j sigma)(+1) via the same prefix machinery."""
        edges = self.edge_values(sigma)
        return edges[j, 0], edges[j, -1]

    def edge_values(self, sigma):
        """(4, m+1) array of (G_j sigma) at the mesh breakpoints.

        Breakpoints see no partial integrals: the q-side collects the full
        subintervals to their left, the p-side those to their right.
        """
        sigma = np.asarray(sigma, dtype=float)
        f_q = np.einsum('imu,mu->mi', self.wq, sigma)
        f_p = np.einsum('imu,mu->mi', self.wp, sigma)
        left = np.vstack([np.zeros(4), np.cumsum(f_q, axis=0)])
        right = np.vstack([np.cumsum(f_p[::-1], axis=0)[::-1], np.zeros(4)])
        inner = left + right  # (m + 1, 4)
        xb = self.mesh.breakpoints
        out = np.zeros((4, len(xb)))
        for j in range(4):
            for i in range(4 - j):
                out[j] += _deriv_factor(i, j) * xb ** i * inner[:, i + j]
        return out

    # -- per-subinterval materialization (tests, invariants) --------------

    def full_row(self, k, j, i, branch):
        """Row mapping sigma node values in subinterval k to the integral of
        the branch polynomial (order j, x-power i) over the subinterval."""
        table = split_kernel(j).q_table if branch == 'q' else split_kernel(j).p_table
        t = self.mesh.nodes[k]
        poly = sum(table[i, d] * t ** d for d in range(4))
        return poly * self.mesh.weights[k]

    def partial_table(self, k, j, i, branch):
        """(n, n) table: sigma node values -> partial integrals from the
        subinterval's left end (q) or to its right end (p) at each node."""
        fac = _deriv_factor(i, j)
        hw = 0.5 * self.mesh.width
        if branch == 'q':
            gamma, base = self.gamma_q[k, i + j], self.qpart
        else:
            gamma, base = self.gamma_p[k, i + j], self.ppart
        return fac * hw * np.einsum('d,dvu->vu', gamma, base)


def build_tables(mesh, kernels=None):
    """Precompute the apply tables for a mesh (O(m n^2 + n^3) work).

    kernels may override the split tables (used by validation's mutation
    checks); by default the shipped biharmonic split form is used.
    """
    n = mesh.n
    if kernels is None:
        q_base, p_base = Q_TABLE, P_TABLE
    else:
        q_base, p_base = kernels
    qpart, ppart = partial_power_tables(n)
    mids = mesh.midpoints
    hw = 0.5 * mesh.width
    gamma_q = _recenter(q_base, mids, hw)
    gamma_p = _recenter(p_base, mids, hw)
    tpow = np.stack([mesh.nodes ** e for e in range(4)])
    wq = np.einsum('ie,emn->imn', q_base, tpow) * mesh.weights[None]
    wp = np.einsum('ie,emn->imn', p_base, tpow) * mesh.weights[None]
    xpow = np.stack([mesh.nodes ** i for i in range(4)])
    return PartialIntegralTables(mesh, qpart, ppart, gamma_q, gamma_p, wq, wp, xpow)


def apply_G(j, sigma, tables):
    """(G_j sigma) at all global nodes; sigma holds node values, shape (m, n)."""
    return tables.apply_all(sigma)[j]


def apply_LG0(coeff_tables, sigma, tables):
    """(L G_0 sigma) at all global nodes for the normalized operator:
    sigma + sum_j a_j * (G_j sigma), with coeff_tables of shape (4, m, n)."""
    sigma = np.asarray(sigma, dtype=float)
    g = tables.apply_all(sigma)
    return sigma + np.einsum('jmn,jmn->mn', np.asarray(coeff_tables), g)
