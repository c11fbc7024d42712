import itertools

import pytest
from hypothesis import given, settings, strategies as st

from stratified import gf
from stratified.errors import (
    DegreeMismatch,
    DivisionByZero,
    NoSolution,
    NotPrime,
    ReducibleModulus,
    Singular,
    SpecMismatch,
)
from stratified.gf import FieldElement, FieldSpec, arith, linalg, make_field, prime_field

# irreducible moduli, constant term first
FIELDS = {
    (2, 1): [0, 1],
    (2, 2): [1, 1, 1],
    (2, 3): [1, 1, 0, 1],
    (3, 1): [0, 1],
    (3, 2): [1, 0, 1],
    (3, 3): [1, 2, 0, 1],
    (5, 1): [0, 1],
    (5, 2): [2, 0, 1],
    (5, 3): [1, 1, 0, 1],
}


def field(p, m):
    return make_field(p, m, FIELDS[(p, m)])


def test_prime_field():
    F = make_field(2, 1, [0, 1])
    assert F.q == 2 and F == prime_field(2)


def test_f4_and_reducible_modulus():
    F4 = make_field(2, 2, [1, 1, 1])
    T = F4.gen
    assert T * (T + 1) == F4.one
    assert T.inverse() == T + 1
    with pytest.raises(ReducibleModulus):
        make_field(2, 2, [1, 0, 1])


def test_construction_errors():
    with pytest.raises(NotPrime):
        make_field(4, 1, [0, 1])
    with pytest.raises(DegreeMismatch):
        make_field(2, 2, [1, 1])
    with pytest.raises(DegreeMismatch):
        make_field(2, 2, [1, 1, 0])  # not monic


def test_irreducibility_matches_root_free_quadratics():
    # a monic quadratic or cubic is irreducible iff it has no root in F_p
    for p in (2, 3, 5):
        for m in (2, 3):
            for lower in itertools.product(range(p), repeat=m):
                mod = list(lower) + [1]
                has_root = any(sum(c * x ** i for i, c in enumerate(mod)) % p == 0 for x in range(p))
                assert gf.is_irreducible(mod, p) == (not has_root)


def test_arith_examples():
    F2 = prime_field(2)
    assert arith(F2(1), F2(1), "add") == F2(0)
    F4 = field(2, 2)
    T = F4.gen
    assert arith(T, T + 1, "mul") == F4.one
    assert arith(F4.one, T, "div") == T + 1
    assert arith(T, 3, "pow") == F4.one
    with pytest.raises(DivisionByZero):
        arith(T, F4.zero, "div")
    with pytest.raises(SpecMismatch):
        arith(T, prime_field(2)(1), "add")


def test_element_digits_and_text():
    F9 = field(3, 2)
    a = FieldElement(F9, [2, 1])
    assert a.digits == [2, 1]
    assert F9.format(a.code) == "2+1*T"
    assert F9.parse("2+1*T") == a
    assert F9.parse("T+2") == a
    assert F9.parse("0") == F9.zero
    assert FieldSpec.from_json(F9.to_json()) == F9


@pytest.mark.parametrize("p,m", sorted(FIELDS))
def test_fermat(p, m):
    F = field(p, m)
    for a in F.elements():
        if a:
            assert a ** (F.q - 1) == F.one
            assert a * a.inverse() == F.one


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(FIELDS)), st.data())
def test_field_axioms(pm, data):
    F = field(*pm)
    el = st.integers(0, F.q - 1).map(F.element)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == F.zero
    if b:
        assert (a / b) * b == a


def test_linalg_examples():
    F2 = prime_field(2)
    one, zero = F2(1), F2(0)
    assert linalg([[one, zero], [zero, one]], "kernel") == []
    assert linalg([[one, one], [one, one]], "kernel") == [[one, one]]
    v, ker = linalg([[one, zero], [zero, one]], "solve", [one, zero])
    assert v == [one, zero] and ker == []
    assert linalg([[one, one], [one, one]], "rank") == 1
    with pytest.raises(Singular):
        linalg([[one, one], [one, one]], "inverse")
    with pytest.raises(NoSolution):
        linalg([[one, one], [one, one]], "solve", [one, zero])


def _matvec(F, rows, v):
    out = []
    for row in rows:
        acc = 0
        for a, b in zip(row, v):
            acc = F.add(acc, F.mul(a, b))
        out.append(acc)
    return out


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)]), st.integers(1, 4), st.integers(1, 5), st.data())
def test_solve_and_kernel_substitute_back(pm, nrows, ncols, data):
    F = field(*pm)
    code = st.integers(0, F.q - 1)
    rows = [[data.draw(code) for _ in range(ncols)] for _ in range(nrows)]
    ker = gf.kernel(F, rows, ncols)
    assert len(ker) == ncols - gf.rank(F, rows)
    for v in ker:
        assert _matvec(F, rows, v) == [0] * nrows
    x = [data.draw(code) for _ in range(ncols)]
    rhs = _matvec(F, rows, x)
    sol, ker2 = gf.solve(F, rows, rhs, ncols)
    assert _matvec(F, rows, sol) == rhs
    assert ker2 == ker


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(2, 2), (3, 1), (5, 1)]), st.integers(1, 4), st.data())
def test_inverse_roundtrip(pm, n, data):
    F = field(*pm)
    rows = [[data.draw(st.integers(0, F.q - 1)) for _ in range(n)] for _ in range(n)]
    if gf.rank(F, rows) < n:
        with pytest.raises(Singular):
            gf.inverse(F, rows)
        return
    inv = gf.inverse(F, rows)
    assert gf.matmul(F, rows, inv) == gf.identity(n)


def test_joint_eigenspaces():
    F3 = prime_field(3)
    a = [[1, 0], [0, 2]]
    b = [[0, 0], [0, 1]]
    pieces = gf.joint_eigenspaces(F3, [a, b], range(3))
    assert sorted(label for label, _ in pieces) == [(1, 0), (2, 1)]
    assert gf.joint_eigenspaces(F3, [[[0, 1], [0, 0]]], range(3)) is None
