## Gauss sums and epsilon factors, computed exactly.
## Run: python demos/gauss_and_epsilon.py

from fractions import Fraction

from padic_periods.characters import MultChar, alpha_of, enumerate_chars, gauss_sum
from padic_periods.scenarios import sc_for
from padic_periods.values import EXACT

p = 5

## The quadratic character mod 5 against psi(u/5) gives sqrt(5)/4.
g = gauss_sum(MultChar.quadratic(p), Fraction(1, p))
print("quadratic Gauss sum:", g, "=", g.to_complex(), "; sqrt(5)/4 =", (EXACT.sqrt_p(p) / 4).to_complex())

## A character of conductor k only sees the shell v(m) = -k.
chi = enumerate_chars(p, 2, level=2)[3]
for j in range(1, 5):
    g = gauss_sum(chi, Fraction(1, p**j))
    print(f"  shell {j}:  |G|^2 = {(g * g.conj()).as_rational() if not g.is_zero() else 0}")

## alpha_chi linearizes chi near 1: chi(1 + 5x) = psi(alpha x / 5).
print("alpha of chi:", alpha_of(chi).alpha)

## A supercuspidal of conductor 4, from a level-2 character of the unramified quadratic extension.
sc = sc_for(p, 4)
print(sc)
for nu in enumerate_chars(p, 1):
    C = sc.C(nu.at_level(sc.L))
    print(f"  C_nu for nu index {nu.s}: |C|^2 = {(C * C.conj()).as_rational()}, C ~ {C.to_complex():.4f}")

## Twisting by the quadratic character flips the sign by -((-1)/q).
quad = MultChar.quadratic(p, sc.L)
one = MultChar.trivial(p, sc.L)
print("C_quad / C_1 =", (sc.C(quad) * sc.C(one).conj()).as_rational())
