from fractions import Fraction as F

import pytest

from padic_periods.characters import enumerate_chars, psi_angle, root
from padic_periods.padic_base import InvalidParameter, PrecisionError, mat, mat_mul, vp
from padic_periods.principal_series import (
    borel_lower,
    build_ps,
    induced_phi,
    ps_matrix_coefficient,
    whittaker,
)
from padic_periods.scenarios import ps_for, square_mus


@pytest.fixture(scope="module")
def ps2():
    return ps_for(5, 2)


@pytest.fixture(scope="module")
def ps3():
    return ps_for(5, 3)


def test_identity_is_one(ps2, ps3):
    assert induced_phi(ps2, mat(1, 0, 0, 1)).eq_rational(1)
    assert ps_matrix_coefficient(ps3, 1, 0, ps3.n).eq_rational(1)


def test_central_character(ps2):
    g = mat(2, 1, 5, 3)
    z = mat(3, 0, 0, 3)
    lhs = induced_phi(ps2, mat_mul(z, g))
    assert lhs == induced_phi(ps2, g) * ps2.central.value(3)


def test_k0_acts_through_mu(ps2):
    for u in (2, 3, 4, 7):
        assert induced_phi(ps2, mat(1, 0, 25, u)) == ps2.chi2.value(u)
        assert induced_phi(ps2, mat(u, 0, 25, 1)).eq_rational(1)


def test_whittaker_i0_vanishes_deep(ps3):
    assert whittaker(ps3, 0, F(1, 5**4)).is_zero()
    assert whittaker(ps3, 0, F(2, 5**5)).is_zero()


@pytest.mark.parametrize("alpha", [F(1, 125), F(2, 25), F(3), F(7, 5)])
def test_whittaker_i0_formula(ps3, alpha):
    p, n = 5, ps3.n
    v = vp(alpha, p)
    w = whittaker(ps3, 0, alpha)
    unit = ps3.chi2.value(alpha) * root(psi_angle(alpha, p))
    # |W|^2 = q^(-v - 2n), and the phase is mu(alpha) psi(alpha)
    assert (w * w.conj()).eq_rational(F(p) ** (-v - 2 * n))
    ratio = w * unit.conj()
    assert (ratio - ratio.conj()).is_zero() and ratio.to_complex().real > 0


def test_whittaker_middle_support(ps3):
    n = ps3.n
    for i in (1, 2):
        for v in range(-4, 3):
            for u in (1, 2, 3, 4, 6):
                w = whittaker(ps3, i, F(u) * F(5) ** v)
                if v != i - n:
                    assert w.is_zero()


def test_whittaker_index_range(ps2):
    with pytest.raises(InvalidParameter):
        whittaker(ps2, 3, 1)


def test_matrix_coefficient_support(ps2, ps3):
    for v in (0, 1):
        for m in (0, 1, F(1, 5)):
            assert ps_matrix_coefficient(ps2, F(5) ** v * 2, m, 1).is_zero()
    assert ps_matrix_coefficient(ps3, F(2, 5), 0, 1).is_zero()
    assert not ps_matrix_coefficient(ps3, F(2, 25), 0, 1).is_zero()


def test_lower_i0_shift_vanishes(ps2):
    n = ps2.n
    for va in range(-3, 2):
        alpha = F(3) * F(5) ** va
        for vm in range(min(0, va + n), 3):
            m = F(2) * F(5) ** vm
            g = mat_mul(mat(alpha, m - alpha, 0, 1), mat(1, 0, 1, 1))
            assert induced_phi(ps2, g).is_zero()


def test_whittaker_and_induced_models_agree(ps2):
    n = ps2.n
    for i in range(n + 1):
        for alpha in (F(1), F(3, 5), F(2, 25)):
            for m in (F(0), F(3, 25)):
                got = ps_matrix_coefficient(ps2, alpha, m, i)
                assert got == induced_phi(ps2, borel_lower(alpha, m, i, 5))


def test_twisted_model_is_phi_times_chi_det(ps2):
    chi = enumerate_chars(5, 1, level=1)[0]
    tw = build_ps(ps2.chi2, chi)
    for g in (mat(3, F(1, 5), 5, 2), mat(1, 2, 25, 3), mat(F(1, 5), 1, 1, 7)):
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        assert induced_phi(tw, g) == induced_phi(ps2, g) * chi.value(det)


def test_twist_must_not_raise_the_level(ps2):
    chi = enumerate_chars(5, 2, level=2)[0]
    with pytest.raises(InvalidParameter):
        build_ps(ps2.chi2, chi)


def test_unramified_mu_rejected():
    with pytest.raises(InvalidParameter):
        build_ps(enumerate_chars(5, 1)[0])


def test_square_mus_are_squares():
    for mu in square_mus(5, 2):
        assert any((nu * nu) == mu for nu in enumerate_chars(5, 2))


def test_truncation_guard(ps2):
    with pytest.raises(PrecisionError):
        induced_phi(ps2, mat(1, 0, 0, 1), T=20)
