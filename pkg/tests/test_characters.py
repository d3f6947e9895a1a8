from fractions import Fraction

import pytest

from padic_periods.characters import (
    EChar,
    MultChar,
    alpha_of,
    alpha_of_E,
    brute_conductor,
    chars_up_to,
    e_chars,
    enumerate_chars,
    eval_add,
    eval_add_E,
    gauss_sum,
    is_regular,
    norm_lift,
    stationary_phase_shift,
    trivial_on_Fstar,
)
from padic_periods.padic_base import InvalidParameter
from padic_periods.values import EXACT, CycValue


def test_additive_character_normalization(E5):
    assert eval_add(Fraction(3, 1), 5).eq_rational(1)
    assert eval_add(Fraction(1, 5), 5) == CycValue.zeta(5)
    assert eval_add_E(0, Fraction(1, 5), E5).eq_rational(1)


def test_level_one_group_at_five():
    chars = enumerate_chars(5, 1)
    assert len(chars) == 4
    assert sum(c.conductor == 0 for c in chars) == 1
    assert sum(c.is_quadratic() for c in chars) == 1


def test_level_two_group_at_five():
    chars = enumerate_chars(5, 2)
    assert len(chars) == 20
    assert sum(c.conductor == 2 for c in chars) == 16


@pytest.mark.parametrize("p, n", [(5, 1), (5, 2), (5, 3), (7, 2)])
def test_conductor_matches_brute_force(p, n):
    for chi in enumerate_chars(p, n):
        assert brute_conductor(chi) == chi.conductor


def test_chars_up_to_is_the_conductor_filter():
    got = {c.s for c in chars_up_to(5, 2, 3)}
    want = {c.s for c in enumerate_chars(5, 3) if c.conductor <= 2}
    assert got == want


def test_inert_characters_trivial_on_F_at_level_one(E5):
    chars = e_chars(E5, 1)
    assert len(chars) == 6
    assert all(trivial_on_Fstar(c) for c in chars)


def test_alpha_by_shell_search():
    for chi in enumerate_chars(5, 2, level=2):
        a = alpha_of(chi).alpha
        assert 1 <= a <= 4
        # chi(1 + 5x) = psi(a x / 5) on every shell point
        for x in range(25):
            assert chi.angle(1 + 5 * x) == Fraction(a * x % 5, 5)


def test_alpha_of_square_doubles():
    for chi in enumerate_chars(5, 2, level=2):
        assert alpha_of(chi**2).alpha == (2 * alpha_of(chi).alpha) % 5


def test_alpha_map_is_surjective():
    hit = {alpha_of(c).alpha for c in enumerate_chars(5, 2, level=2)}
    assert hit == {1, 2, 3, 4}


def test_alpha_undefined_below_conductor_two():
    with pytest.raises(InvalidParameter):
        alpha_of(MultChar.quadratic(5))


def test_norm_lift_conductors(E5, R5):
    chi = enumerate_chars(5, 2, level=2)[0]
    assert norm_lift(MultChar.trivial(5), E5).conductor == 0
    assert norm_lift(chi, E5).conductor == 2
    assert norm_lift(chi, R5).conductor == 3


def test_norm_lift_values_are_chi_of_norm(E5):
    chi = enumerate_chars(5, 2, level=2)[3]
    lift = norm_lift(chi, E5)
    for a, b in [(1, 1), (2, 3), (7, 5), (1, 10)]:
        assert lift.angle(a, b) == chi.angle(a * a - 2 * b * b)


def test_quadratic_gauss_sum_value():
    g = gauss_sum(MultChar.quadratic(5), Fraction(1, 5))
    assert g == EXACT.sqrt_p(5) / 4
    assert abs(g.to_complex() - 0.5590169943749474) < 1e-12


@pytest.mark.parametrize("p", [5, 7])
def test_gauss_sum_shell_law(p):
    for k in (1, 2, 3):
        want = Fraction(p, (p - 1) ** 2 * p ** (k - 1))
        for chi in enumerate_chars(p, k, level=k):
            for j in (1, 2, 3, 4):
                g = gauss_sum(chi, Fraction(1, p**j))
                if j == k:
                    assert (g * g.conj()).eq_rational(want)
                else:
                    assert g.is_zero()


def test_gauss_sum_against_direct_sum():
    p = 7
    chi = enumerate_chars(p, 2, level=2)[5]
    m = Fraction(3, 49)
    units = [u for u in range(49) if u % p]
    direct = sum((chi.value(u) * eval_add(m * u, p) for u in units), CycValue(1)) / len(units)
    assert gauss_sum(chi, m) == direct


def test_stationary_phase_trivial_nu_is_one():
    chi = enumerate_chars(5, 2, level=2)[0]
    assert stationary_phase_shift(chi, MultChar.trivial(5, 2)).eq_rational(1)


@pytest.mark.parametrize("c", [2, 3])
def test_stationary_phase_identity(c):
    for chi in enumerate_chars(5, c, level=c):
        for nu in enumerate_chars(5, 1, level=1):
            stationary_phase_shift(chi, nu.at_level(c))


def test_stationary_phase_range():
    chi = enumerate_chars(5, 2, level=2)[0]
    with pytest.raises(InvalidParameter):
        stationary_phase_shift(chi, enumerate_chars(5, 2, level=2)[1])


def test_alpha_of_E_on_the_half_shell(E5):
    theta = EChar(E5, 0, (0, Fraction(1, 25)))
    assert theta.conductor == 2
    t1, t2 = alpha_of_E(theta)
    D = E5.D
    for x1 in range(5):
        for x2 in range(5):
            x1_, x2_ = Fraction(5 * x1), Fraction(5 * x2)
            # psi_E(alpha x / p^2) = psi(2 Re(alpha x) / p^2)
            re = (t1 * x1_ + t2 * x2_ * D) / 25
            assert theta.value(1 + x1_, x2_) == eval_add_E(re, 0, E5)


def test_regularity(E5):
    theta = EChar(E5, 0, (0, Fraction(1, 25)))
    assert is_regular(theta)
    assert not is_regular(norm_lift(MultChar.quadratic(5), E5))


def test_galois_conjugate_and_inverse(E5):
    theta = EChar(E5, 0, (0, Fraction(1, 25)))
    for a, b in [(1, 1), (3, 2), (1, 5)]:
        assert theta.galois().angle(a, b) == theta.angle(a, -b)
        assert (theta.inverse().angle(a, b) + theta.angle(a, b)) % 1 == 0
