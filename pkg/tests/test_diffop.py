import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stratified import PolyRing, binom_mod_p, divided_partial, p_adic_digits, prime_field
from stratified.diffop import DigitVector, binom_digits_mod_p
from stratified.errors import DenominatorDivisibleByP, UnknownVariable

from oracles import (
    binom_exact,
    binom_rational,
    p_adic_by_inverse,
    pascal_mod_p,
    random_poly,
    reduce_mod_p,
)


def test_binom_examples():
    assert binom_mod_p(5, 2, 2) == 0
    assert binom_mod_p(7, 0, 3) == 1
    for p in (2, 3, 5):
        for k in range(12):
            assert binom_mod_p(-1, k, p) == pow(p - 1, k, p)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_binom_matches_pascal(p):
    table = pascal_mod_p(200, p)
    for h in range(201):
        for k in range(h + 1):
            assert binom_mod_p(h, k, p) == table[h][k]


@pytest.mark.parametrize("p", [2, 3])
def test_binom_negative_upper_index(p):
    for h in range(-40, 0):
        for k in range(30):
            assert binom_mod_p(h, k, p) == binom_exact(h, k) % p


@pytest.mark.parametrize("p", [2, 3])
def test_prime_power_binomials_vanish(p):
    for h in range(6):
        n = p ** h
        assert all(binom_mod_p(n, k, p) == 0 for k in range(1, n))


def test_divided_partial_examples():
    F3 = prime_field(3)
    R = PolyRing(F3, ("x", "y"))
    x, y = R.gens()
    assert divided_partial(x ** 5, "x", 2) == x ** 3
    assert divided_partial(y, "x", 1).is_zero()
    assert divided_partial(x ** 4, "x", 0) == x ** 4
    L = PolyRing(F3, ("x",), (True,))
    xl = L.gen("x")
    assert divided_partial(xl ** -1, "x", 1) == -(xl ** -2)
    with pytest.raises(UnknownVariable):
        divided_partial(x, "z", 1)


def test_p_adic_examples():
    assert p_adic_digits(1, 1, 2, 3).digits == (1, 0, 0, 0)
    assert p_adic_digits(1, 2, 3, 3).digits == (2, 1, 1, 1)
    assert p_adic_digits(-1, 1, 2, 3).digits == (1, 1, 1, 1)
    with pytest.raises(DenominatorDivisibleByP):
        p_adic_digits(1, 3, 3, 2)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_p_adic_matches_inverse_oracle(p):
    for a in range(-20, 21):
        for b in range(1, 15):
            if b % p:
                assert p_adic_digits(a, b, p, 6).digits == p_adic_by_inverse(a, b, p, 6)


@pytest.mark.parametrize("a,b,p", [(1, 2, 3), (-1, 1, 2), (2, 3, 5), (-3, 4, 5), (1, 3, 2), (0, 1, 3)])
def test_digits_give_binomials_at_prime_powers(a, b, p):
    alpha = Fraction(a, b)
    dv = p_adic_digits(a, b, p, 4)
    for h in range(5):
        assert reduce_mod_p(binom_rational(alpha, p ** h), p) == dv[h]
        assert binom_digits_mod_p(dv, p ** h) == dv[h]


@pytest.mark.parametrize("a,b,p", [(1, 2, 3), (-1, 1, 2), (2, 7, 5), (1, 6, 7)])
def test_digits_eventually_periodic(a, b, p):
    ds = p_adic_digits(a, b, p, 80).digits
    # period divides the order of p modulo b
    order = next(n for n in range(1, b + 1) if pow(p, n, b) == 1 % b) if b > 1 else 1
    tail = ds[20:]
    assert all(tail[i] == tail[i + order] for i in range(len(tail) - order))


def test_digit_vector_validation():
    with pytest.raises(ValueError):
        DigitVector(2, (0, 2))
    assert str(DigitVector(3, (2, 1, 1))) == "2,1,1"


# -- operator laws --------------------------------------------------------

RINGS = {p: PolyRing(prime_field(p), ("x", "y")) for p in (2, 3)}
LRINGS = {p: PolyRing(prime_field(p), ("x",), (True,)) for p in (2, 3)}


def _leibniz(f, g, var, k):
    lhs = divided_partial(f * g, var, k)
    rhs = f.ring.zero
    for a in range(k + 1):
        rhs = rhs + divided_partial(f, var, a) * divided_partial(g, var, k - a)
    return lhs == rhs


def _compose(f, var, k, l):
    p = f.ring.spec.p
    lhs = divided_partial(divided_partial(f, var, l), var, k)
    return lhs == divided_partial(f, var, k + l).scale(binom_mod_p(k + l, k, p))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(0, 2 ** 32), st.integers(0, 16))
def test_leibniz(p, s, k):
    rnd = random.Random(s)
    f, g = random_poly(RINGS[p], rnd), random_poly(RINGS[p], rnd)
    assert _leibniz(f, g, "x", k)
    fl, gl = random_poly(LRINGS[p], rnd, min_exp=-8), random_poly(LRINGS[p], rnd, min_exp=-8)
    assert _leibniz(fl, gl, "x", k)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(0, 2 ** 32), st.integers(0, 16), st.integers(0, 16))
def test_composition(p, s, k, l):
    f = random_poly(RINGS[p], random.Random(s))
    assert _compose(f, "x", k, l)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(0, 2 ** 32), st.integers(0, 9), st.integers(0, 9))
def test_cross_variable_commutation(p, s, k, l):
    f = random_poly(RINGS[p], random.Random(s))
    a = divided_partial(divided_partial(f, "y", l), "x", k)
    b = divided_partial(divided_partial(f, "x", k), "y", l)
    assert a == b
