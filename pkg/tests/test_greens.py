import numpy as np
import pytest

from fourbvp.greens import (P_TABLE, Q_TABLE, PSI_COEFFS, cubic_eval,
                            green_branch, green_eval, psi_alpha, psi_cubic,
                            split_kernel)
from fourbvp.quadrature import gauss_rule


def test_boundary_vanishing():
    t = np.linspace(-1.0, 1.0, 101)
    for j in (0, 1):
        assert np.max(np.abs(green_eval(j, -1.0, t))) <= 1e-14
        assert np.max(np.abs(green_eval(j, 1.0, t))) <= 1e-14


def test_value_at_origin():
    assert green_eval(0, 0.0, 0.0) == pytest.approx(1.0 / 24.0, abs=1e-16)


def test_third_derivative_jump_in_t():
    for x in (-0.7, 0.0, 0.4):
        jump = green_eval(3, x, x + 1e-9) - green_eval(3, x, x - 1e-9)
        assert jump == pytest.approx(-1.0, abs=1e-6)


def test_continuity_lower_orders():
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.9, 0.9, size=50)
    for j in (0, 1, 2):
        gap = np.abs(green_eval(j, x, x + 1e-8) - green_eval(j, x, x - 1e-8))
        assert np.max(gap) <= 1e-6


def test_symmetry():
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, size=200)
    t = rng.uniform(-1, 1, size=200)
    assert np.max(np.abs(green_eval(0, x, t) - green_eval(0, t, x))) <= 1e-14


def test_diagonal_uses_lower_branch():
    y = 0.3
    assert green_eval(3, y, y) == pytest.approx(green_branch(3, y, y, 'q'))


@pytest.mark.parametrize("j", range(4))
def test_split_kernel_reconstruction(j):
    rng = np.random.default_rng(2 + j)
    kern = split_kernel(j)
    a = rng.uniform(-1, 1, size=200)
    b = rng.uniform(-1, 1, size=200)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    assert np.max(np.abs(kern.evaluate(hi, lo, 'q')
                         - green_branch(j, hi, lo, 'q'))) <= 1e-13
    assert np.max(np.abs(kern.evaluate(lo, hi, 'p')
                         - green_branch(j, lo, hi, 'p'))) <= 1e-13


def test_split_kernel_shapes():
    # x-degree per branch is 3 - j: exactly 4 - j x-powers, cubic in t
    for j in range(4):
        kern = split_kernel(j)
        assert kern.q_table.shape == (4 - j, 4)
        assert kern.p_table.shape == (4 - j, 4)
    assert split_kernel(3).q_table.shape[0] == 1


def test_base_tables_match_product_form():
    # the monomial tables must reproduce the printed product formulas
    rng = np.random.default_rng(3)
    t = rng.uniform(-1, 1, size=100)
    tpow = np.stack([t ** d for d in range(4)])
    for i in range(4):
        qi = Q_TABLE[i] @ tpow
        pi = P_TABLE[i] @ tpow
        assert qi.shape == t.shape and pi.shape == t.shape
    x = rng.uniform(-1, 1, size=100)
    recon_q = sum(x ** i * (Q_TABLE[i] @ tpow) for i in range(4))
    assert np.max(np.abs(recon_q - green_branch(0, x, t, 'q'))) <= 1e-15


def test_green_quartic_identity():
    # phi(x) = int G0(x, t) 24 dt is the unique quartic with phi'''' = 24 and
    # zero boundary data; integrate each branch separately (polynomials)
    fine = gauss_rule(20)
    rng = np.random.default_rng(4)
    for x in rng.uniform(-1, 1, size=50):
        s = -1.0 + (x + 1.0) * (fine.nodes + 1.0) / 2.0
        w = (x + 1.0) / 2.0 * fine.weights
        left = np.sum(green_branch(0, x, s, 'q') * w)
        s = x + (1.0 - x) * (fine.nodes + 1.0) / 2.0
        w = (1.0 - x) / 2.0 * fine.weights
        right = np.sum(green_branch(0, x, s, 'p') * w)
        assert 24.0 * (left + right) == pytest.approx((x ** 2 - 1) ** 2, abs=1e-12)


def test_psi_cardinality():
    # each cubic has exactly one unit entry among the four boundary data
    data = np.empty((4, 4))
    for c in range(4):
        data[c] = (psi_cubic(c, -1.0, 0), psi_cubic(c, 1.0, 0),
                   psi_cubic(c, -1.0, 1), psi_cubic(c, 1.0, 1))
    assert np.allclose(data, np.eye(4), atol=1e-15)


def test_psi_fourth_derivative_vanishes():
    x = np.linspace(-1, 1, 11)
    for c in range(4):
        assert np.all(cubic_eval(PSI_COEFFS[c], x, 4) == 0.0)


def test_psi_alpha_cases():
    x = np.linspace(-1, 1, 7)
    assert np.all(psi_alpha((0, 0, 0, 0), x) == 0.0)
    assert psi_alpha((1, 0, 0, 0), -1.0) == pytest.approx(1.0)
    assert psi_alpha((1, 0, 0, 0), 1.0) == pytest.approx(0.0, abs=1e-15)
    assert psi_alpha((1, 0, 0, 0), -1.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert psi_alpha((1, 0, 0, 0), 1.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert psi_alpha((0, 0, 1, 0), -1.0, 1) == pytest.approx(1.0)
    assert psi_alpha((0, 0, 1, 0), 1.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert psi_alpha((0, 0, 1, 0), -1.0) == pytest.approx(0.0, abs=1e-15)
    assert psi_alpha((0, 0, 1, 0), 1.0) == pytest.approx(0.0, abs=1e-15)


def test_branch_requires_valid_arguments():
    with pytest.raises(ValueError):
        green_branch(0, 0.0, 0.0, 'z')
    with pytest.raises(ValueError):
        green_branch(4, 0.0, 0.0, 'q')
