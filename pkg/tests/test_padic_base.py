from fractions import Fraction

import pytest

from padic_periods.padic_base import (
    INF,
    ExtElem,
    InvalidParameter,
    InvalidPrime,
    PrecisionError,
    ResidueElem,
    conjugated_torus_decompose,
    coset_count,
    ext_conj,
    ext_mul,
    ext_norm,
    ext_val,
    in_k0,
    iwasawa_decompose,
    lower_unipotent,
    make_params,
    mat,
    mat_mul,
    torus_cosets,
    torus_matrix,
    vp,
)


def test_default_inert_and_ramified_parameters():
    E = make_params(5, "inert", 6)
    assert E.D == 2 and E.e == 1
    R = make_params(5, "ramified", 6)
    assert R.D == 5 and R.xi == 1 and R.e == 2


@pytest.mark.parametrize("p", [4, 9, 2, 3, 1])
def test_bad_primes_rejected(p):
    with pytest.raises(InvalidPrime):
        make_params(p, "inert")


def test_square_D_rejected_for_inert():
    with pytest.raises(InvalidParameter):
        make_params(5, "inert", D=4)


def test_residue_arithmetic_and_zero_floor():
    x = ResidueElem.from_fraction(Fraction(3, 25), 5, 4)
    assert x.val == -2 and x.to_fraction() == Fraction(3, 25)
    z = ResidueElem.from_fraction(5**6, 5, 4)
    assert z.is_zero() and z.val == 4
    assert (x * x.inverse()).to_fraction() == 1


def test_extension_norm_and_conjugate(E5):
    one_plus = ExtElem.from_fractions(1, 1, E5)
    nrm = ext_norm(one_plus).to_fraction()
    assert (nrm + 1) % 5**6 == 0 and nrm % 5 == 4
    x = ExtElem.from_fractions(2, 3, E5)
    prod = ext_mul(ext_conj(x), x)
    assert (prod.a.to_fraction() + 14) % 5**6 == 0 and prod.b.is_zero()


def test_ramified_valuations(R5):
    sqrtD = ExtElem.from_fractions(0, 1, R5)
    five = ExtElem.from_fractions(5, 0, R5)
    assert ext_val(sqrtD) == 1 and ext_val(five) == 2


def test_precision_mismatch_is_an_error(E5):
    x = ExtElem.from_fractions(1, 1, E5, n=3)
    y = ExtElem.from_fractions(1, 1, E5, n=4)
    with pytest.raises(PrecisionError):
        ext_mul(x, y)


def _recompose(part, p):
    return mat_mul(mat_mul(part.borel, lower_unipotent(Fraction(p) ** part.i)), part.k0)


@pytest.mark.parametrize(
    "g, i",
    [((1, 0, 0, 1), 2), ((1, 0, 5, 1), 1), ((1, 1, 1, 2), 0), ((3, 7, 50, 1), 2), ((2, 1, 15, 4), 1)],
)
def test_iwasawa_decomposition_recomposes(g, i):
    g = mat(*g)
    part = iwasawa_decompose(g, 2, 5)
    assert part.i == i
    assert part.borel[1][0] == 0
    assert in_k0(part.k0, 2, 5)
    assert _recompose(part, 5) == g


def test_conjugated_torus_upper_case(E5):
    dec = conjugated_torus_decompose(1, 1, 2, E5)
    assert dec.case == "upper" and dec.i == 2
    assert vp(dec.m, 5) == -2
    assert dec.matrix(5) == torus_matrix(1, 1, 2, 2, 5)


def test_conjugated_torus_lower_case(E5):
    dec = conjugated_torus_decompose(25, 1, 1, E5)
    assert dec.case == "lower"
    assert vp(dec.r + 1, 5) == 1
    assert dec.matrix(5) == torus_matrix(25, 1, 1, 2, 5)


def test_central_element_clamps():
    dec = conjugated_torus_decompose(3, 0, 2, make_params(5))
    assert dec.i == INF and dec.z == 3


@pytest.mark.parametrize("kind", ["inert", "ramified"])
def test_every_coset_representative_recomposes(kind):
    P = make_params(7, kind)
    for d in range(0, 4):
        for a, b in torus_cosets(7, kind, 2).points:
            if a == 0 and b == 0:
                continue
            assert conjugated_torus_decompose(a, b, d, P).matrix(7) == torus_matrix(a, b, d, P.D, 7)


@pytest.mark.parametrize("kind", ["inert", "ramified"])
def test_coset_counts(kind):
    for k in (1, 2, 3):
        assert len(torus_cosets(5, kind, k).points) == coset_count(5, kind, k)
    assert coset_count(5, "inert", 2) == 30 and coset_count(5, "ramified", 1) == 10
