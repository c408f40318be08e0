"""Full solve orchestration: factorization, the local+matching sweep, the
deferred-corrections loop, general boundary conditions, and evaluation."""

from dataclasses import dataclass
from typing import List

import numpy as np

from .fast_apply import PartialIntegralTables, build_tables
from .greens import PSI_COEFFS, cubic_eval
from .linalg import SingularMatrixError, qr_factor
from .local import LocalSystem, assemble_local, homogeneous_basis, solve_local
from .matching import factor_matching, matching_matrix, matching_rhs
from .problem import build_mesh, from_unit, normalize_leading, rescale_problem
from .quadrature import legendre_eval, legendre_transform

_EPS = np.finfo(float).eps


@dataclass
class SolverOptions:
    m: int
    n: int
    max_iterations: int = 30
    stagnation_ratio: float = 0.5
    target_residual: float = 10 * _EPS

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one subinterval")
        if self.n < 4:
            raise ValueError("need at least four nodes per subinterval")
        if not 0.0 < self.stagnation_ratio < 1.0:
            raise ValueError("stagnation ratio must lie in (0, 1)")


@dataclass
class Factorization:
    """Everything that depends only on the operator, mesh, and node counts;
    reusable across right-hand sides and boundary data."""

    problem: object
    options: SolverOptions
    mesh: object
    nodes_original: np.ndarray    # (m, n) sampling points on [a, b]
    coeff_tables: np.ndarray      # (4, m, n) normalized rescaled a_0..a_3
    a4_tilde: np.ndarray          # (m, n) rescaled leading coefficient
    local_systems: List[LocalSystem]
    basis_values: np.ndarray      # (m, 4, 5, n) in global unit coordinates
    basis_boundary: np.ndarray    # (m, 4, 2, 4) in global unit coordinates
    band_matrix: object
    band_factor: object
    tables: PartialIntegralTables
    psi_tables: np.ndarray        # (4 cubics, 4 derivs, m, n)

    @property
    def interval(self):
        return self.problem.interval

    def weighted_norm(self, values):
        return float(np.sqrt(np.sum(self.mesh.weights * values * values)))


@dataclass
class PiecewiseSolution:
    """Per-subinterval Legendre expansions of phi^(0)..phi^(4) on [a, b].

    The order-k table holds the exact expansion of the computed solution's
    k-th derivative (degree n - 1 + (4 - k); the arrays are padded to a
    common width), obtained by antidifferentiating sigma's expansion rather
    than by interpolating node values, so evaluation commits no extra
    representation error.
    """

    interval: tuple
    m: int
    n: int
    breakpoints: np.ndarray       # (m + 1,) in original coordinates
    coefficients: np.ndarray      # (5, m, n + 4)
    node_values: np.ndarray       # (5, m, n)
    node_x: np.ndarray            # (m, n)

    def __call__(self, x, k=0):
        return evaluate(self, x, k)


def factorize(p, options):
    """Build all reusable solve artifacts for the operator of `p`."""
    m, n = options.m, options.n
    tilde = rescale_problem(p)
    mesh = build_mesh(m, n)
    coeff_tables, _, a4_tilde = normalize_leading(tilde, mesh.nodes)
    hw = 0.5 * mesh.width
    local_systems = []
    basis_values = np.empty((m, 4, 5, n))
    basis_boundary = np.empty((m, 4, 2, 4))
    up = float(m) ** np.arange(5)  # (2/h)^j conversion factors, h = 2/m
    for k in range(m):
        aloc = (hw ** (4 - np.arange(4)))[:, None] * coeff_tables[:, k, :]
        system = assemble_local(aloc, mesh.rule, index=k)
        local_systems.append(system)
        basis = homogeneous_basis(system, derivative_scale=hw)
        for jb, sol in enumerate(basis.solutions):
            basis_values[k, jb] = up[:, None] * sol.values
            basis_boundary[k, jb, 0] = up[:4] * sol.left
            basis_boundary[k, jb, 1] = up[:4] * sol.right
    band_matrix = matching_matrix(basis_boundary[:, :, 0, :], basis_boundary[:, :, 1, :])
    band_factor = factor_matching(band_matrix)
    tables = build_tables(mesh)
    psi_tables = np.empty((4, 4, m, n))
    for c in range(4):
        for j in range(4):
            psi_tables[c, j] = cubic_eval(PSI_COEFFS[c], mesh.nodes, j)
    nodes_original = from_unit(mesh.nodes, p.interval)
    return Factorization(p, options, mesh, nodes_original, coeff_tables, a4_tilde,
                         local_systems, basis_values, basis_boundary,
                         band_matrix, band_factor, tables, psi_tables)


def _sweep(fact, rhs_global):
    """One local+matching pass on the monic unit-domain equation with zero
    boundary data; returns the global sigma it produces."""
    m, n = fact.options.m, fact.options.n
    hw = 0.5 * fact.mesh.width
    up = float(m) ** np.arange(4)
    tilde_sigma = np.empty((m, n))
    tilde_left = np.empty((m, 4))
    tilde_right = np.empty((m, 4))
    for k in range(m):
        loc = solve_local(fact.local_systems[k], hw ** 4 * rhs_global[k])
        tilde_sigma[k] = loc.sigma
        tilde_left[k] = up * loc.left
        tilde_right[k] = up * loc.right
    rhs = matching_rhs(tilde_left, tilde_right, np.zeros(4))
    beta = fact.band_factor.solve(rhs).reshape(m, 4)
    basis_sigma = fact.basis_values[:, :, 4, :]
    return float(m) ** 4 * tilde_sigma + np.einsum('kj,kjn->kn', beta, basis_sigma)


def _stagnated(log, ratio):
    return (len(log) >= 3 and log[-1] > ratio * log[-2]
            and log[-2] > ratio * log[-3])


def solve(fact, f=None, alpha=None, options=None):
    """Solve L phi = f with boundary data alpha using the factorization.

    Runs deferred corrections on the global integral equation: boundary data
    enter only through f_alpha = f - L psi_alpha, every sweep solves with
    zero boundary data, and the iteration log records the relative residual
    entering each iteration (the first entry is that of the zero initial
    state).  Non-convergence is not an error; the log reports the floor.

    Returns (PiecewiseSolution, iteration log).
    """
    opts = options or fact.options
    if opts.m != fact.options.m or opts.n != fact.options.n:
        raise ValueError("solver options do not match the factorization geometry")
    p = fact.problem
    if f is None:
        f = p.f
    if alpha is None:
        alpha = p.alpha
    a, b = p.interval
    scale = 2.0 / (b - a)
    m, n = fact.options.m, fact.options.n

    fx = np.asarray(f(fact.nodes_original), dtype=float)
    fbar = np.broadcast_to(fx, fact.nodes_original.shape) / fact.a4_tilde
    alpha_t = np.array([alpha[0], alpha[1], alpha[2] / scale, alpha[3] / scale])
    psi = np.einsum('c,cjmn->jmn', alpha_t, fact.psi_tables)
    f_alpha = fbar - np.einsum('jmn,jmn->mn', fact.coeff_tables, psi)
    denom = fact.weighted_norm(f_alpha)

    sigma = np.zeros((m, n))
    log = []
    solves = 0
    g = None  # kernel images of the current sigma, reused after the loop
    while True:
        if solves == 0:
            delta = f_alpha
        else:
            g = fact.tables.apply_all(sigma)
            delta = f_alpha - sigma - np.einsum('jmn,jmn->mn', fact.coeff_tables, g)
        res = fact.weighted_norm(delta)
        log.append(res / denom if denom > 0 else res)
        if log[-1] <= opts.target_residual:
            break
        if _stagnated(log, opts.stagnation_ratio):
            break
        if solves >= opts.max_iterations:
            break
        sigma = sigma + _sweep(fact, delta)
        solves += 1
        g = None

    if g is None:
        g = fact.tables.apply_all(sigma)
    values = np.empty((5, m, n))
    values[:4] = g + psi
    values[4] = sigma
    coefficients = _expansion_tables(fact, sigma, alpha_t)
    powers = scale ** np.arange(5)
    values *= powers[:, None, None]
    coefficients *= powers[:, None, None]
    breakpoints = a + (b - a) * np.arange(m + 1) / m
    breakpoints[-1] = b
    solution = PiecewiseSolution((a, b), m, n, breakpoints, coefficients,
                                 values, fact.nodes_original)
    return solution, log


def _antiderivative_batch(c):
    """Rows of primitives vanishing at -1, via int P_k = (P_{k+1}-P_{k-1})/(2k+1)."""
    rows, width = c.shape
    b = np.zeros((rows, width + 1))
    b[:, 1] += c[:, 0]
    k = np.arange(1, width)
    b[:, 2:] += c[:, 1:] / (2 * k + 1)
    b[:, 0:width - 1] -= c[:, 1:] / (2 * k + 1)
    b[:, 0] = -b[:, 1:] @ ((-1.0) ** np.arange(1, width + 1))
    return b


def _expansion_tables(fact, sigma, alpha_t):
    """Exact per-subinterval expansions of phi^(0..4) on the unit domain.

    sigma's degree-(n-1) expansion is antidifferentiated four times in the
    local coordinate; each integration constant is the derivative's value at
    the subinterval's left edge, obtained from the prefix sums of the apply
    tables (plus the boundary cubic).  phi^(j) then has exact degree
    n - 1 + (4 - j).
    """
    m, n = fact.options.m, fact.options.n
    hw = 0.5 * fact.mesh.width
    edges = fact.tables.edge_values(sigma)[:, :-1]  # (4, m): left edges
    for j in range(4):
        edges[j] += np.einsum('c,cm->m', alpha_t,
                              np.stack([cubic_eval(PSI_COEFFS[c],
                                                   fact.mesh.breakpoints[:-1], j)
                                        for c in range(4)]))
    coefficients = np.zeros((5, m, n + 4))
    transform = legendre_transform(n)
    coefficients[4, :, :n] = np.einsum('cu,mu->mc', transform.to_coeffs, sigma)
    for j in range(3, -1, -1):
        width = n + 4 - j
        prim = hw * _antiderivative_batch(coefficients[j + 1, :, :width - 1])
        prim[:, 0] += edges[j]
        coefficients[j, :, :width] = prim
    return coefficients


def evaluate(sol, x, k=0):
    """phi^(k)(x) for x in [a, b] (scalar or array).

    Interior breakpoints belong to the subinterval on their left; the
    expansion of the containing subinterval is evaluated in its local
    coordinate.
    """
    if not 0 <= k <= 4:
        raise ValueError("derivative order must be in 0..4")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    a, b = sol.interval
    if np.any(xv < a) or np.any(xv > b):
        raise ValueError(f"evaluation point outside [{a}, {b}]")
    h = (b - a) / sol.m
    idx = np.clip(np.ceil((xv - a) / h).astype(int) - 1, 0, sol.m - 1)
    s = np.clip(2.0 * (xv - sol.breakpoints[idx]) / h - 1.0, -1.0, 1.0)
    p = legendre_eval(sol.coefficients.shape[2] - 1, s)
    out = np.einsum('pc,cp->p', sol.coefficients[k][idx], p)
    return float(out[0]) if scalar else out


def solve_general_bc(fact, f, bcs, options=None):
    """Solve with four general boundary functionals by superposition.

    One solve with zero standard boundary data plus four homogeneous solves
    with cardinal standard data; the 4x4 system on the functionals fixes the
    combination.  Raises if the functionals are not independent for this
    operator.
    """
    if len(bcs) != 4:
        raise ValueError("expected four boundary functionals")
    a, b = fact.interval
    zero_f = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    base, _ = solve(fact, f, (0.0, 0.0, 0.0, 0.0), options)
    homogeneous = []
    for i in range(4):
        alpha = [0.0] * 4
        alpha[i] = 1.0
        homogeneous.append(solve(fact, zero_f, tuple(alpha), options)[0])

    def functional(bc, sol):
        acc = 0.0
        for j in range(4):
            if bc.left_weights[j]:
                acc += bc.left_weights[j] * evaluate(sol, a, j)
            if bc.right_weights[j]:
                acc += bc.right_weights[j] * evaluate(sol, b, j)
        return acc

    mat = np.array([[functional(bc, hom) for hom in homogeneous] for bc in bcs])
    rhs = np.array([bc.target - functional(bc, base) for bc in bcs])
    try:
        coeffs = qr_factor(mat).solve(rhs)
    except SingularMatrixError as exc:
        raise ValueError("boundary functionals are not independent for this "
                         "operator") from exc
    coefficients = base.coefficients.copy()
    node_values = base.node_values.copy()
    for c, hom in zip(coeffs, homogeneous):
        coefficients += c * hom.coefficients
        node_values += c * hom.node_values
    return PiecewiseSolution(base.interval, base.m, base.n, base.breakpoints,
                             coefficients, node_values, base.node_x)
