"""Dense QR and banded LU solvers backing the local and matching steps."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, qr, solve_triangular

_EPS = np.finfo(float).eps


class SingularMatrixError(np.linalg.LinAlgError):
    """Matrix is singular to working precision."""


@dataclass
class DenseFactor:
    """Householder QR factors of a square matrix."""

    order: int
    q: np.ndarray
    r: np.ndarray

    def solve(self, b):
        return solve_triangular(self.r, self.q.T @ np.asarray(b, dtype=float))


def qr_factor(a, rtol=1e3 * _EPS):
    """QR-factor a square matrix for repeated solves.

    Raises SingularMatrixError when a triangular diagonal entry falls below
    rtol times the largest row norm.  Callers that must press on through
    genuinely ill-conditioned systems (singular leading coefficients) may
    lower rtol to an underflow-level guard.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    q, r = qr(a)
    scale = np.max(np.linalg.norm(a, axis=1))
    if np.min(np.abs(np.diag(r))) < rtol * scale:
        raise SingularMatrixError("matrix is singular to working precision")
    return DenseFactor(a.shape[0], q, r)


class TruncatedFactor:
    """Pseudo-inverse solve with the numerically null directions removed.

    A subinterval touching a root of the leading coefficient yields a local
    system with an isolated singular value at roundoff level (the growing
    indicial mode of the singular point); solving through it injects noise
    amplified past working precision.  Dropping directions below rtol times
    the largest singular value keeps the solve bounded, at the cost of never
    resolving the (physically absent) null component.
    """

    def __init__(self, a, rtol=1e-12):
        u, s, vt = np.linalg.svd(np.asarray(a, dtype=float))
        if s[0] == 0.0:
            raise SingularMatrixError("matrix is singular to working precision")
        keep = s > rtol * s[0]
        self.order = a.shape[0]
        self.rank = int(np.sum(keep))
        self._ut = u[:, keep].T.copy()
        self._v = vt[keep].T.copy()
        self._s = s[keep]

    def solve(self, b):
        return self._v @ ((self._ut @ np.asarray(b, dtype=float)) / self._s)


@dataclass
class BandedMatrix:
    """Square banded matrix in LAPACK band storage.

    bands[ku + i - j, j] = A[i, j] for entries within the band; anything
    outside is structurally zero.
    """

    order: int
    lower_bandwidth: int
    upper_bandwidth: int
    bands: np.ndarray

    @classmethod
    def zeros(cls, order, lower_bandwidth, upper_bandwidth):
        bands = np.zeros((lower_bandwidth + upper_bandwidth + 1, order))
        return cls(order, lower_bandwidth, upper_bandwidth, bands)

    @classmethod
    def from_dense(cls, a, lower_bandwidth, upper_bandwidth):
        a = np.asarray(a, dtype=float)
        out = cls.zeros(a.shape[0], lower_bandwidth, upper_bandwidth)
        i, j = np.nonzero(a)
        out.set_entries(i, j, a[i, j])
        return out

    def set_entries(self, rows, cols, values):
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        if np.any(cols - rows > self.upper_bandwidth) or np.any(rows - cols > self.lower_bandwidth):
            raise ValueError("entry outside the stored band")
        self.bands[self.upper_bandwidth + rows - cols, cols] = values

    def to_dense(self):
        a = np.zeros((self.order, self.order))
        for d in range(-self.lower_bandwidth, self.upper_bandwidth + 1):
            idx = np.arange(max(0, -d), min(self.order, self.order - d))
            a[idx, idx + d] = self.bands[self.upper_bandwidth - d, idx + d]
        return a


class BandedLU:
    """LU factors of a banded matrix (partial pivoting), reusable across
    right-hand sides.  Pivoting widens the stored upper band by the lower
    bandwidth, per the LAPACK storage convention."""

    def __init__(self, matrix):
        kl, ku = matrix.lower_bandwidth, matrix.upper_bandwidth
        ab = np.zeros((2 * kl + ku + 1, matrix.order))
        ab[kl:] = matrix.bands
        gbtrf, = get_lapack_funcs(('gbtrf',), (ab,))
        lu, ipiv, info = gbtrf(ab, kl, ku)
        if info > 0:
            raise SingularMatrixError(
                f"banded matrix is singular to working precision (pivot {info})")
        self.order = matrix.order
        self.kl = kl
        self.ku = ku
        self._lu = lu
        self._ipiv = ipiv

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.order:
            raise ValueError("right-hand side length does not match the order")
        gbtrs, = get_lapack_funcs(('gbtrs',), (self._lu,))
        x, info = gbtrs(self._lu, self.kl, self.ku, rhs, self._ipiv)
        if info != 0:
            raise SingularMatrixError("banded back-substitution failed")
        return x


def banded_factor_solve(matrix, rhs):
    """Solve B x = rhs by banded LU with partial pivoting, O(order) cost."""
    return BandedLU(matrix).solve(rhs)
