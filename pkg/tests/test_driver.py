import numpy as np
import pytest

from fourbvp import (BVProblem, GeneralBC, SolverOptions, evaluate, factorize,
                     solve, solve_general_bc)
from fourbvp.greens import psi_cubic
from fourbvp.problem import from_unit, rescale_problem

from helpers import (polyfreq_coeffs, quartic_problem, quartic_reference,
                     zero_field)

EPS = np.finfo(float).eps


def _sin5_problem():
    coeffs = polyfreq_coeffs()

    def f(x):
        x = np.asarray(x, dtype=float)
        return sum((1.0 + x ** (4 - j)) * 5.0 ** j * np.sin(5.0 * x + 0.5 * j * np.pi)
                   for j in range(5))

    return BVProblem(coeffs, f, (0.0, 2.0 * np.pi), (0.0, 0.0, 5.0, 5.0))


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(0, 6)
    with pytest.raises(ValueError):
        SolverOptions(4, 3)
    with pytest.raises(ValueError):
        SolverOptions(4, 6, stagnation_ratio=1.5)


def test_factorize_biharmonic_locals_are_identity():
    fact = factorize(quartic_problem(), SolverOptions(4, 6))
    for system in fact.local_systems:
        assert np.array_equal(system.matrix, np.eye(6))
    # homogeneous bases are the boundary cubics of each subinterval; the
    # slope cardinals carry the h/2 factor of a unit slope in global coords
    rule_nodes = fact.mesh.rule.nodes
    half_width = 0.5 * fact.mesh.width
    for k in range(4):
        for c in range(4):
            scale = 1.0 if c < 2 else half_width
            assert np.allclose(fact.basis_values[k, c, 0, :],
                               scale * psi_cubic(c, rule_nodes), atol=1e-12)


def test_factorization_reuse_is_deterministic():
    problem = _sin5_problem()
    opts = SolverOptions(8, 8)
    fact1 = factorize(problem, opts)
    f2 = lambda x: np.cos(np.asarray(x, dtype=float))
    _ = solve(fact1)  # a first solve must not perturb later ones
    sol_a, log_a = solve(fact1, f2)
    fact2 = factorize(problem, opts)
    sol_b, log_b = solve(fact2, f2)
    assert np.array_equal(sol_a.coefficients, sol_b.coefficients)
    assert log_a == log_b


def test_zero_data_yields_zero_solution():
    problem = BVProblem(polyfreq_coeffs(), zero_field, (0.0, 2.0 * np.pi))
    fact = factorize(problem, SolverOptions(4, 6))
    sol, log = solve(fact)
    assert log == [0.0]
    assert np.all(sol.node_values == 0.0)
    assert evaluate(sol, 1.0, 0) == 0.0


@pytest.mark.parametrize("m,n", [(1, 4), (4, 6), (16, 10)])
def test_quartic_end_to_end(m, n):
    fact = factorize(quartic_problem(), SolverOptions(m, n))
    sol, log = solve(fact)
    assert len(log) - 1 <= 2  # machine-accurate within two sweeps
    x = np.linspace(-1.0, 1.0, 1000)
    for k in range(5):
        err = np.max(np.abs(evaluate(sol, x, k) - quartic_reference(x, k)))
        assert err <= 1e-12 * max(1.0, np.max(np.abs(quartic_reference(x, k))))


def test_sin5_solution_accuracy():
    problem = _sin5_problem()
    fact = factorize(problem, SolverOptions(16, 10))
    sol, _ = solve(fact)
    x = np.linspace(0.0, 2.0 * np.pi, 2000)
    err = np.linalg.norm(evaluate(sol, x, 0) - np.sin(5 * x)) / np.linalg.norm(np.sin(5 * x))
    assert err <= 1e-8


def test_defect_identity_after_convergence():
    problem = _sin5_problem()
    for m in (16, 32, 64):
        _, log = solve(factorize(problem, SolverOptions(m, 10)))
        assert min(log) <= 1e3 * EPS


def test_evaluate_boundary_and_nodes():
    problem = _sin5_problem()
    fact = factorize(problem, SolverOptions(8, 10))
    sol, _ = solve(fact)
    assert evaluate(sol, 0.0, 0) == pytest.approx(0.0, abs=1e-10)
    assert evaluate(sol, 2.0 * np.pi, 0) == pytest.approx(0.0, abs=1e-10)
    assert evaluate(sol, 0.0, 1) == pytest.approx(5.0, abs=1e-9)
    # stored node values are reproduced by the expansions; roundoff in the
    # reconstruction scales with sigma (the largest derivative), not with phi
    scale = max(1.0, np.max(np.abs(sol.node_values)))
    for k in range(5):
        got = evaluate(sol, sol.node_x.ravel(), k)
        assert np.max(np.abs(got - sol.node_values[k].ravel())) <= 1e-12 * scale


def test_evaluate_quartic_midpoint():
    fact = factorize(quartic_problem(), SolverOptions(4, 6))
    sol, _ = solve(fact)
    assert evaluate(sol, 0.0, 0) == pytest.approx(1.0, abs=1e-13)


def test_evaluate_rejects_out_of_range():
    fact = factorize(quartic_problem(), SolverOptions(2, 5))
    sol, _ = solve(fact)
    with pytest.raises(ValueError):
        evaluate(sol, 1.5, 0)
    with pytest.raises(ValueError):
        evaluate(sol, 0.0, 5)


def test_solution_callable_and_array_eval():
    fact = factorize(quartic_problem(), SolverOptions(2, 5))
    sol, _ = solve(fact)
    x = np.linspace(-1, 1, 11)
    assert np.allclose(sol(x, 0), quartic_reference(x, 0), atol=1e-12)
    assert sol(0.5) == pytest.approx(quartic_reference(np.array(0.5), 0))


def test_off_node_ode_residual():
    problem = _sin5_problem()
    fact = factorize(problem, SolverOptions(16, 10))
    sol, _ = solve(fact)
    rng = np.random.default_rng(5)
    x = rng.uniform(0.0, 2.0 * np.pi, size=100)
    residual = sum((1.0 + x ** (4 - j)) * evaluate(sol, x, j) for j in range(5)) \
        - problem.f(x)
    fmax = np.max(np.abs(problem.f(np.linspace(0, 2 * np.pi, 1000))))
    assert np.max(np.abs(residual)) / fmax <= 1e-8


def test_rescaling_equivalence():
    # solving the problem directly equals solving its rescaled twin
    problem = _sin5_problem()
    sol, _ = solve(factorize(problem, SolverOptions(16, 10)))
    tilde = rescale_problem(problem)
    sol_t, _ = solve(factorize(tilde, SolverOptions(16, 10)))
    y = np.linspace(-1.0, 1.0, 500)
    x = from_unit(y, problem.interval)
    assert np.max(np.abs(evaluate(sol, x, 0) - evaluate(sol_t, y, 0))) <= 1e-10


def test_residual_log_shape():
    problem = _sin5_problem()
    _, log = solve(factorize(problem, SolverOptions(16, 10)))
    assert log[0] == 1.0
    assert log[1] < 1e-9
    assert len(log) <= 10


def test_max_iterations_is_respected():
    problem = _sin5_problem()
    opts = SolverOptions(8, 10, max_iterations=1, target_residual=1e-30,
                         stagnation_ratio=0.999999)
    _, log = solve(factorize(problem, opts), options=opts)
    assert len(log) == 2  # the seed entry plus one post-sweep residual


def test_general_bc_matches_standard_solve():
    problem = _sin5_problem()
    fact = factorize(problem, SolverOptions(8, 10))
    sol_std, _ = solve(fact)
    bcs = (GeneralBC(left_weights=(1, 0, 0, 0), target=0.0),
           GeneralBC(right_weights=(1, 0, 0, 0), target=0.0),
           GeneralBC(left_weights=(0, 1, 0, 0), target=5.0),
           GeneralBC(right_weights=(0, 1, 0, 0), target=5.0))
    sol_gen = solve_general_bc(fact, problem.f, bcs)
    x = np.linspace(0.0, 2.0 * np.pi, 400)
    assert np.max(np.abs(evaluate(sol_gen, x, 0) - evaluate(sol_std, x, 0))) <= 1e-11


def test_general_bc_zero_targets():
    problem = BVProblem(polyfreq_coeffs(), zero_field, (0.0, 2.0 * np.pi))
    fact = factorize(problem, SolverOptions(4, 6))
    bcs = (GeneralBC(left_weights=(1, 0, 0, 0)),
           GeneralBC(right_weights=(1, 0, 0, 0)),
           GeneralBC(left_weights=(0, 0, 1, 0)),
           GeneralBC(right_weights=(0, 0, 1, 0)))
    sol = solve_general_bc(fact, problem.f, bcs)
    x = np.linspace(0.0, 2.0 * np.pi, 50)
    assert np.max(np.abs(evaluate(sol, x, 0))) <= 1e-12


def test_general_bc_rejects_dependent_functionals():
    problem = _sin5_problem()
    fact = factorize(problem, SolverOptions(4, 6))
    same = GeneralBC(left_weights=(1, 0, 0, 0))
    with pytest.raises(ValueError):
        solve_general_bc(fact, problem.f, (same, same, same, same))


def test_bessel_factorization_succeeds():
    from fourbvp.experiments import build_problem
    problem, _ = build_problem('bessel')
    fact = factorize(problem, SolverOptions(16, 20))
    assert len(fact.local_systems) == 16


def test_homogeneous_boundary_data_gives_boundary_cubic():
    # L = d^4, f = 0, cardinal alpha: the solution is exactly the cubic
    fact = factorize(quartic_problem(), SolverOptions(4, 6))
    x = np.linspace(-1.0, 1.0, 400)
    for c, alpha in enumerate(((1, 0, 0, 0), (0, 1, 0, 0),
                               (0, 0, 1, 0), (0, 0, 0, 1))):
        sol, _ = solve(fact, zero_field, alpha)
        for k in range(4):
            got = evaluate(sol, x, k)
            assert np.max(np.abs(got - psi_cubic(c, x, k))) <= 1e-12


def test_cubic_reproduced_exactly_by_variable_coefficient_operator():
    # a cubic solution has sigma = 0, so any operator reproduces it exactly
    coeffs = polyfreq_coeffs()
    cubic = lambda x, k=0: np.polyval(np.polyder([0.5, -1.0, 0.25, 2.0], k), x)

    def f(x):
        x = np.asarray(x, dtype=float)
        return sum((1.0 + x ** (4 - j)) * cubic(x, j) for j in range(4))

    alpha = (cubic(np.array(-1.0)), cubic(np.array(1.0)),
             cubic(np.array(-1.0), 1), cubic(np.array(1.0), 1))
    problem = BVProblem(coeffs, f, (-1.0, 1.0), alpha)
    sol, log = solve(factorize(problem, SolverOptions(8, 6)))
    x = np.linspace(-1.0, 1.0, 500)
    assert np.max(np.abs(evaluate(sol, x, 0) - cubic(x))) <= 1e-13
    assert np.max(np.abs(sol.node_values[4])) <= 1e-12


def test_solve_rejects_mismatched_options():
    fact = factorize(quartic_problem(), SolverOptions(4, 6))
    with pytest.raises(ValueError):
        solve(fact, options=SolverOptions(8, 6))
