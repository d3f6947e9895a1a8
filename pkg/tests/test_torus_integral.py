from fractions import Fraction as F

import pytest

from padic_periods.characters import MultChar, chars_up_to, e_chars, enumerate_chars
from padic_periods.padic_base import InvalidParameter
from padic_periods.scenarios import central_lift, ps_for, sc_for
from padic_periods.torus_integral import (
    TestVectorSpec,
    VanishingIntegral,
    averaged_test_vector,
    check_central,
    decay_experiment,
    epsilon_dichotomy,
    invariance_depth,
    local_integral,
    solve_square,
    spherical_phi,
    spherical_phi_oracle,
    twist_omega,
    twist_reduce,
    twisted_sc_integral,
    vanishing_sweep,
    volume_identity,
)
from padic_periods.values import FLOAT


@pytest.fixture(scope="module")
def sc4():
    return sc_for(5, 4)


@pytest.fixture(scope="module")
def sc3r():
    return sc_for(5, 3)


def good_eta(sc, omega):
    """A level <= 1 eta with eta(-1) C_1 Omega(sqrt D) = 1."""
    C1 = sc.C(MultChar.trivial(sc.p, sc.L))
    for eta in chars_up_to(sc.p, 1, sc.L):
        if (eta.value(-1) * C1 * omega.value(0, 1)).eq_rational(1):
            return eta
    raise AssertionError("no eta satisfies the sign condition")


def test_inert_even_value(sc4, E5):
    om = e_chars(E5, 0)[0]
    r = local_integral(sc4, TestVectorSpec(2, good_eta(sc4, om)), om, E5)
    assert r.value_exact.eq_rational(F(1, 6))
    assert r.coset_count == 30


def test_closed_and_oracle_paths_agree(sc4, E5):
    om = e_chars(E5, 1)[2]
    spec = TestVectorSpec(2, chars_up_to(5, 1, 4)[1])
    a = local_integral(sc4, spec, om, E5, method="closed").value_exact
    b = local_integral(sc4, spec, om, E5, method="oracle").value_exact
    assert a == b


def test_float_backend_value(E5):
    sc = sc_for(5, 4, backend=FLOAT)
    om = e_chars(E5, 0)[0]
    r = local_integral(sc, TestVectorSpec(2, good_eta(sc_for(5, 4), om)), om, E5)
    assert abs(complex(r.value_exact) - 1 / 6) < 1e-9


def test_ramified_value(sc3r, R5):
    om = e_chars(R5, 0)[0]
    r = local_integral(sc3r, TestVectorSpec(1, good_eta(sc3r, om)), om, R5)
    assert r.value_exact.eq_rational(F(1, 2))


def test_principal_series_value(E5):
    ps = ps_for(5, 2)
    om = central_lift(ps.chi2, E5) * e_chars(E5, 1)[1]
    r = local_integral(ps, TestVectorSpec(1), om, E5)
    assert r.value_exact.eq_rational(F(1, 6))


def test_omega_must_invert_the_central_character(E5):
    ps = ps_for(5, 2)
    with pytest.raises(InvalidParameter):
        check_central(ps, e_chars(E5, 1)[1])


def test_vanishing_away_from_k(sc4, E5):
    om = e_chars(E5, 0)[0]
    for r in vanishing_sweep(sc4, om, E5, [0, 1, 3, 4]):
        assert r.value_exact.is_zero()


def test_vanishing_for_odd_conductor_on_inert_torus(E5):
    sc = sc_for(5, 3)
    for om in e_chars(E5, 1)[:3]:
        for r in vanishing_sweep(sc, om, E5, range(0, 4)):
            assert r.value_exact.is_zero()


def test_volume_identity(E5, R5):
    for torus in (E5, R5):
        for c, d in [(4, 0), (4, 1), (3, 0)]:
            eq, ge = volume_identity(c, d, torus)
            assert eq == (torus.p - 1) * ge


def test_dichotomy_predicates(E5, R5):
    assert epsilon_dichotomy(sc_for(5, 3), e_chars(E5, 1)[1], E5) == -1
    assert epsilon_dichotomy(sc_for(5, 4), e_chars(E5, 1)[1], E5) == 1
    assert epsilon_dichotomy(sc_for(5, 3, xi=1), e_chars(R5, 0)[0], R5) == 1
    with pytest.raises(InvalidParameter):
        epsilon_dichotomy(sc_for(5, 4), e_chars(E5, 2)[-1], E5)


def test_invariance_depth(sc4, sc3r, E5, R5):
    om = e_chars(E5, 1)[1]
    assert invariance_depth(sc4, TestVectorSpec(2), om, E5) == 2
    assert invariance_depth(sc3r, TestVectorSpec(1), e_chars(R5, 0)[0], R5) == 2


def test_galois_conjugate_omega_conjugates_I(sc4, E5):
    om = e_chars(E5, 1)[3]
    spec = TestVectorSpec(2, chars_up_to(5, 1, 4)[2])
    a = local_integral(sc4, spec, om, E5).value_exact
    b = local_integral(sc4, spec, om.galois(), E5).value_exact
    assert b == a.conj()


def test_twist_identity_supercuspidal(sc4, E5):
    om = e_chars(E5, 1)[-1]
    spec = TestVectorSpec(2)
    base = local_integral(sc4, spec, om, E5).value_exact
    for chi in enumerate_chars(5, 1, level=1):
        assert twisted_sc_integral(sc4, spec, om, E5, chi) == base


def test_twist_reduce_principal_series(E5):
    ps = ps_for(5, 2)
    om = central_lift(ps.chi2, E5) * e_chars(E5, 1)[-1]
    chi = enumerate_chars(5, 1, level=1)[1]
    from padic_periods.principal_series import build_ps

    twisted = build_ps(ps.chi2, chi)
    om_t = twist_omega(om, chi, E5)
    base, om_back = twist_reduce(twisted, None, om_t, E5)
    assert base.chi1.conductor == 0
    a = local_integral(twisted, TestVectorSpec(1), om_t, E5).value_exact
    b = local_integral(base, TestVectorSpec(1), om_back, E5).value_exact
    assert a == b


def test_twist_reduce_identity(sc4, E5):
    om = e_chars(E5, 0)[0]
    assert twist_reduce(sc4, None, om, E5) == (sc4, om)


def test_certificates(sc4, sc3r, E5, R5):
    om = e_chars(E5, 0)[0]
    cert = averaged_test_vector(sc4, TestVectorSpec(2, good_eta(sc4, om)), om, E5)
    assert cert.group == (2, 2) and cert.normality and cert.pairing.eq_rational(F(1, 6))
    omr = e_chars(R5, 0)[0]
    cert = averaged_test_vector(sc3r, TestVectorSpec(1, good_eta(sc3r, omr)), omr, R5)
    assert cert.group == (2, 1) and cert.normality and cert.pairing.eq_rational(F(1, 2))


def test_no_certificate_for_a_vanishing_vector(sc4, E5):
    with pytest.raises(VanishingIntegral):
        averaged_test_vector(sc4, TestVectorSpec(0), e_chars(E5, 0)[0], E5)


def test_solve_square():
    assert solve_square(F(2), 7, 1) == [3, 4]
    assert sorted(solve_square(F(4), 5, 2)) == [2, 23]
    assert solve_square(F(2), 5, 1) == []


def test_spherical_formula_against_shell_sum():
    import cmath

    a = cmath.exp(0.7j)
    for v in range(6):
        assert abs(spherical_phi(5, a, v) - spherical_phi_oracle(5, a, v)) < 1e-9
    assert abs(spherical_phi(5, a, 0) - 1) < 1e-12


def test_decay(E5):
    rows, slope, drift = decay_experiment(5, e_chars(E5, 0)[0], 5)
    assert rows[0][1] <= 1 + 1e-12
    assert slope <= -0.375 + 0.05
    assert drift < 1e-9


def test_decay_rejects_omega_nontrivial_on_F(E5):
    lift = central_lift(MultChar(5, 2, 2), E5)
    with pytest.raises(InvalidParameter):
        decay_experiment(5, lift, 3)
