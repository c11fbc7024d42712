import time

import pytest

from stratified import (
    FamilySpec,
    GaugeMatrix,
    PolyRing,
    StratifiedModule,
    apply_operator,
    gauge_degree_profile,
    gauge_transform,
    horizontal_sections,
    make_family,
    make_field,
    explicit_gauge,
    prime_field,
    restrict_fiber,
    trivialize,
)
from stratified.errors import DuplicatePoints, HasBaseVariables, IndexOutOfRange, NotFoundWithinBound
from stratified.horizon import family_fibers, profile_csv

from oracles import brute_force_min_gauge, random_unipotent

F2 = prime_field(2)
F3 = prime_field(3)
F4 = make_field(2, 2, [1, 1, 1])
F9 = make_field(3, 2, [1, 0, 1])
SPEC4 = FamilySpec(F4, (F4(0), F4(1), F4.gen))
SPEC9 = FamilySpec(F9, (F9(0), F9(1), F9(2)))


def line(field):
    return PolyRing(field, ("x",))


def jordan(field, c):
    R = line(field)
    z = R.zero
    return StratifiedModule(R, (), ("x",), 2, {("x", 1): ((z, z), (R.const(c), z))})


def is_horizontal(M, s, top):
    return all(all(f.is_zero() for f in apply_operator(M, s, "x", k)) for k in range(1, top + 1))


def test_trivial_module_sections():
    R = line(F3)
    T = StratifiedModule.trivial(R, (), ("x",), 2)
    assert horizontal_sections(T, 0) == [(R.one, R.zero), (R.zero, R.one)]
    T1 = StratifiedModule.trivial(R, (), ("x",), 1)
    for bound in range(6):
        assert horizontal_sections(T1, bound) == [(R.one,)]


@pytest.mark.parametrize("field,c", [(F2, F2(1)), (F4, F4.gen), (F3, F3(2))])
def test_jordan_sections(field, c):
    M = jordan(field, c)
    R = M.ring
    x = R.gen("x")
    secs = horizontal_sections(M, 1)
    assert len(secs) == 2
    assert (R.one, R.zero) in secs
    assert (-(R.const(c) * x), R.one) in secs
    for s in secs:
        assert is_horizontal(M, s, 6)
    assert horizontal_sections(M, 0) == [(R.one, R.zero)]


def test_has_base_variables():
    with pytest.raises(HasBaseVariables):
        horizontal_sections(make_family(SPEC4), 2)
    with pytest.raises(HasBaseVariables):
        trivialize(make_family(SPEC4), 2)


def test_make_family_expansion():
    E = make_family(SPEC4)
    x, y = E.ring.gens()
    T = E.ring.const(F4.gen)
    z = E.ring.zero
    assert E.support == {
        ("x", 1): ((z, z), (y, z)),
        ("x", 2): ((z, z), (y * (y + 1), z)),
        ("x", 4): ((z, z), (y * (y + 1) * (y + T), z)),
    }
    assert make_family(FamilySpec(F4, ())).is_trivial()
    assert sorted(k for _, k in make_family(SPEC9).support) == [1, 3, 9]


def test_duplicate_points():
    with pytest.raises(DuplicatePoints):
        FamilySpec(F4, (F4(1), F4(1)))


def test_family_json():
    doc = SPEC4.to_json()
    assert doc["points"] == [[0, 0], [1, 0], [0, 1]]
    assert FamilySpec.from_json(doc) == SPEC4


def test_explicit_gauge_examples():
    U0 = explicit_gauge(SPEC4, 0)
    assert U0 == GaugeMatrix.identity(U0.matrix[0][0].ring, 2)
    U1 = explicit_gauge(FamilySpec(F2, (F2(0), F2(1))), 1)
    x = U1.matrix[0][0].ring.gen("x")
    assert U1[1, 0] == -x
    U2 = explicit_gauge(SPEC4, 2)
    R = U2.matrix[0][0].ring
    x = R.gen("x")
    assert U2[1, 0] == -(R.const(F4.gen) * x + x ** 2)
    with pytest.raises(IndexOutOfRange):
        explicit_gauge(SPEC4, 3)


@pytest.mark.parametrize("spec", [SPEC4, SPEC9], ids=["F4", "F9"])
def test_explicit_gauge_trivializes(spec):
    E = make_family(spec)
    for n, a in enumerate(spec.points):
        fiber = restrict_fiber(E, {"y": a})
        assert gauge_transform(fiber, explicit_gauge(spec, n)).is_trivial()


def test_trivialize_family_fibers():
    res = family_fibers(SPEC4)
    assert [r.certificate.minimal_degree for r in res] == [0, 1, 2]
    for r in res:
        assert r.certificate.revalidate(r.fiber)
        assert r.certificate.gauge == explicit_gauge(SPEC4, r.n)
        assert r.certificate.checked_order_bound >= r.certificate.minimal_degree + r.fiber.max_order()


def test_profiles():
    assert gauge_degree_profile(SPEC4) == [(0, 0), (1, 1), (2, 2)]
    assert gauge_degree_profile(SPEC9) == [(0, 0), (1, 1), (2, 3)]
    assert gauge_degree_profile(FamilySpec(F2, (F2(0),))) == [(0, 0)]
    assert profile_csv([(0, 0), (1, 1)]) == "0,0\n1,1\n"


def test_profile_grows_at_deeper_level():
    F16 = make_field(2, 4, [1, 1, 0, 0, 1])
    T = F16.gen
    spec = FamilySpec(F16, (F16(0), F16(1), T, T + 1))
    assert gauge_degree_profile(spec) == [(0, 0), (1, 1), (2, 2), (3, 4)]


def test_not_found_within_bound():
    fiber = restrict_fiber(make_family(SPEC4), {"y": F4.gen})
    with pytest.raises(NotFoundWithinBound):
        trivialize(fiber, 1)
    assert trivialize(fiber, 2).minimal_degree == 2


def test_solver_matches_brute_force(rng):
    for field in (F2, F3):
        for _ in range(12):
            M = random_unipotent(field, rng.choice([1, 2, 3]), rng.choice([1, 2, 3]), rng)
            expected = brute_force_min_gauge(M, 2 if field is F2 else 1)
            bound = 2 if field is F2 else 1
            if expected is None:
                with pytest.raises(NotFoundWithinBound):
                    trivialize(M, bound)
            else:
                cert = trivialize(M, bound)
                assert (cert.minimal_degree, cert.gauge) == expected
