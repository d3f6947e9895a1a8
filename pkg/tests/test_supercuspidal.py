from fractions import Fraction as F

import pytest

from padic_periods.characters import EChar, EpsilonOutOfRange, MultChar, chars_up_to, eval_add, norm_lift
from padic_periods.padic_base import legendre, torus_cosets
from padic_periods.scenarios import regular_thetas, sc_for
from padic_periods.supercuspidal import (
    GaloisFixed,
    NontrivialCentral,
    basis_vector,
    build_sc,
    c_quotient,
    epsilon_factor,
    epsilon_table,
    kirillov_apply,
    lower_vector,
    mc_closed_form,
    mc_oracle,
    pair_borel,
)
from padic_periods.values import FLOAT, CycValue


@pytest.fixture(scope="module")
def sc4():
    return sc_for(5, 4)


def phi_borel(sc, alpha, m, i, eta=None):
    """Phi_eta([[alpha, m], [0, 1]] n^-(p^i))."""
    eta = eta or MultChar.trivial(sc.p, sc.L)
    vec, (a2, m2) = lower_vector(sc, sc.lift(eta).s, i)
    return pair_borel(sc, vec, F(alpha) * a2, F(alpha) * m2 + F(m), eta)


def test_conductor_from_theta(E5, R5):
    assert build_sc(E5, regular_thetas(5, "inert", 1)[0]).c_pi == 2
    assert build_sc(R5, regular_thetas(5, "ramified", 2, 1)[0]).c_pi == 3


def test_galois_fixed_theta_rejected(E5):
    with pytest.raises(GaloisFixed):
        build_sc(E5, norm_lift(MultChar.quadratic(5), E5))


def test_theta_must_be_trivial_on_F(E5):
    chi = [c for c in chars_up_to(5, 1, 1) if c.conductor and not c.is_quadratic()][0]
    with pytest.raises(NontrivialCentral):
        build_sc(E5, norm_lift(chi, E5))


def test_ramified_characters_trivial_on_F_have_even_conductor(R5):
    from padic_periods.characters import e_chars

    assert {t.conductor % 2 for t in e_chars(R5, 4)} == {0}


def test_epsilon_unitary_for_every_in_range_twist():
    for c in (2, 4):
        sc = sc_for(5, c)
        for eta in chars_up_to(5, sc.k, sc.L):
            eps = epsilon_factor(sc, eta)
            assert (eps * eps.conj()).eq_rational(1)


def test_C_times_C_inverse_is_one(sc4):
    for nu, (C, n) in epsilon_table(sc4).items():
        chi = sc4.char(nu)
        assert (C * sc4.C(chi.inverse())).eq_rational(1)
        assert n == -4


def test_out_of_range_twist(sc4):
    eta = chars_up_to(5, 3, 4)[1]
    with pytest.raises(EpsilonOutOfRange):
        epsilon_factor(sc4, eta)


@pytest.mark.parametrize("p", [5, 7])
def test_quadratic_quotient_sign_inert(p):
    sc = sc_for(p, 4)
    quad = MultChar.quadratic(p, sc.L)
    for eta in chars_up_to(p, 1, sc.L):
        q = sc.C(quad * eta.inverse()) * sc.C(eta.inverse()).conj()
        assert q.eq_rational(-legendre(-1, p))


@pytest.mark.parametrize("xi", [1, 2])
def test_quadratic_quotient_sign_ramified(xi):
    sc = sc_for(5, 3, xi=xi)
    quad = MultChar.quadratic(5, sc.L)
    for eta in chars_up_to(5, 1, sc.L):
        assert c_quotient(sc, quad, eta).eq_rational(legendre(-xi, 5))


def test_c_quotient_trivial_nu(sc4):
    eta = chars_up_to(5, 1, sc4.L)[2]
    assert c_quotient(sc4, MultChar.trivial(5, sc4.L), eta).eq_rational(1)


def test_c_quotient_level_one_nu(sc4):
    for nu in chars_up_to(5, 1, sc4.L):
        for eta in chars_up_to(5, 2, sc4.L):
            if eta.conductor == 1:
                continue
            c_quotient(sc4, nu, eta)


def test_diag_acts_by_character(sc4):
    for nu in chars_up_to(5, 2, sc4.L):
        v = basis_vector(sc4, nu)
        for u in (2, 3, 7):
            out = kirillov_apply(sc4, ("diag", u, 1), v)
            assert out == {(nu.s, 0): nu.value(u)}


def test_omega_squared_is_identity(sc4):
    for nu in chars_up_to(5, 2, sc4.L):
        v = basis_vector(sc4, nu)
        w = kirillov_apply(sc4, ("omega",), kirillov_apply(sc4, ("omega",), v))
        assert set(w) == set(v) and (w[(nu.s, 0)] - 1).is_zero()


def test_unipotent_coefficients_are_gauss_sums(sc4):
    m = F(2, 25)
    out = kirillov_apply(sc4, ("unip", m), basis_vector(sc4, MultChar.trivial(5, sc4.L)))
    units = [u for u in range(25) if u % 5]
    for nu in chars_up_to(5, 2, sc4.L):
        direct = sum((eval_add(m * u, 5) * nu.inverse().value(u) for u in units), CycValue(1)) / len(units)
        assert (out.get((nu.s, 0), CycValue(1)) - direct).is_zero()


def test_newform_normalization(sc4):
    assert phi_borel(sc4, 1, 0, 4).eq_rational(1)


def test_newform_top_shells(sc4):
    for m in (0, 1, 3, 7, F(1, 1)):
        assert phi_borel(sc4, 1, m, 4).eq_rational(1)
        assert phi_borel(sc4, 1, m, 3).eq_rational(F(-1, 4))


@pytest.mark.parametrize("i", [1, 2])
def test_newform_support(sc4, i):
    c = 4
    va0, vm0 = min(0, 2 * i - c), i - c
    for va in range(-4, 2):
        for vm in range(-5, 2):
            if (va, vm) == (va0, vm0):
                continue
            for ua in (1, 2, 3, 7):
                for um in (1, 2, 3, 4, 6, 7, 8, 9, 11):
                    assert phi_borel(sc4, F(ua) * F(5) ** va, F(um) * F(5) ** vm, i).is_zero()
    # on the support shell some units give a nonzero value
    units = [u for u in range(1, 5 ** (1 - vm0)) if u % 5]
    hits = sum(
        not phi_borel(sc4, F(ua) * F(5) ** va0, F(um) * F(5) ** vm0, i).is_zero()
        for ua in (1, 2, 3, 4, 6, 7, 8, 9)
        for um in units
    )
    assert hits > 0


def test_identity_coset_is_one(sc4):
    one = MultChar.trivial(5, sc4.L)
    assert mc_oracle(sc4, one, 1, 0, sc4.k).eq_rational(1)
    assert mc_closed_form(sc4, one, 1, 0).eq_rational(1)


def test_closed_form_matches_oracle(sc4):
    pts = [(a, b) for a, b in torus_cosets(5, "inert", 2).points if a != 0]
    n = 0
    for eta in chars_up_to(5, 2, sc4.L)[::3]:
        for a, b in pts:
            assert mc_closed_form(sc4, eta, a, b) == mc_oracle(sc4, eta, a, b, sc4.k)
            n += 1
    assert n >= 100


def test_ramified_closed_form_matches_oracle(R5):
    sc = sc_for(5, 3)
    for eta in chars_up_to(5, 1, sc.L):
        for a, b in torus_cosets(5, "ramified", 1).points:
            if a == 0:
                continue
            assert mc_closed_form(sc, eta, a, b, R5) == mc_oracle(sc, eta, a, b, sc.k, R5)


def test_float_backend_mirrors_exact(E5):
    theta = EChar(E5, 0, (0, F(1, 25)))
    exact, flt = build_sc(E5, theta), build_sc(E5, theta, FLOAT)
    eta = chars_up_to(5, 1, 4)[1]
    for a, b in [(1, 1), (2, 3), (1, 10)]:
        z = mc_oracle(exact, eta, a, b, 2).to_complex()
        assert abs(z - mc_oracle(flt, eta, a, b, 2)) < 1e-9


def test_twist_by_quadratic_keeps_conductor(E5):
    theta = EChar(E5, 0, (0, F(1, 25)))
    twisted = theta * norm_lift(MultChar.quadratic(5), E5)
    assert build_sc(E5, twisted).c_pi == build_sc(E5, theta).c_pi
