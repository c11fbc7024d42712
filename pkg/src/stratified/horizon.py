"""Horizontal sections, fiber trivialization certificates, and the fiberwise-trivial family.

A section ``v`` (coefficient row of polynomials) is horizontal when
Φ_{i,k}(v) = 0 for every fiber variable ``i`` and every ``k >= 1``.  With the
ansatz deg_i(v) <= B, only the orders ``k <= B + max order`` need checking:
beyond that every term of sum_{a+b=k} ∂^(a)(v)·A_b has ∂^(a)(v) = 0 or A_b = 0.

The family: on K[x, y] with base y and fiber x, rank two,
∂_x^(p^h)(e_2) = prod_{i<=h} (y - a_i) e_1 for h < M and every other
generator acting by zero.  Its fiber over y = a_n is trivialized by a gauge of
x-degree p^(n-1), which is the finite shadow of the family not being
isotrivial over the generic point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import gf
from . import matrices as mx
from .diffop import divided_partial
from .errors import (
    DuplicatePoints,
    HasBaseVariables,
    IndexOutOfRange,
    NotFoundWithinBound,
)
from .gf import FieldElement, FieldSpec
from .poly import Poly, PolyRing
from .stratmod import GaugeMatrix, StratifiedModule, gauge_transform, restrict_fiber


def horizontal_sections(M: StratifiedModule, deg_bound: int) -> list[tuple[Poly, ...]]:
    """Basis of the horizontal sections with per-variable degree <= deg_bound."""
    if M.base_vars:
        raise HasBaseVariables("restrict to a fiber before solving for horizontal sections")
    if deg_bound < 0:
        raise ValueError("deg_bound must be >= 0")
    ring = M.ring
    spec = ring.spec
    r = M.rank
    fvars = M.fiber_vars
    idx = [ring.index(v) for v in fvars]
    monos = []
    for degs in itertools.product(range(deg_bound + 1), repeat=len(fvars)):
        e = [0] * ring.nvars
        for j, d in zip(idx, degs):
            e[j] = d
        monos.append(tuple(e))
    # columns run from the last basis vector down so the echelon basis is
    # led by the constant coefficient of e_j, like e_2 - c*x*e_1
    unknowns = [(j, e) for j in reversed(range(r)) for e in monos]
    rows: dict[tuple, dict[int, int]] = {}
    for col, (j, e) in enumerate(unknowns):
        mono = Poly._make(ring, {e: 1})
        for var in fvars:
            top = deg_bound + M.max_order(var)
            for k in range(1, top + 1):
                acc = {}
                for a in range(k + 1):
                    b = k - a
                    da = divided_partial(mono, var, a) if a else mono
                    if not da.terms:
                        continue
                    if b == 0:
                        acc.setdefault(j, []).append(da)
                        continue
                    A = M.support.get((var, b))
                    if A is None:
                        continue
                    for c, entry in enumerate(A[j]):
                        if entry.terms:
                            acc.setdefault(c, []).append(da * entry)
                for c, parts in acc.items():
                    total = parts[0]
                    for extra in parts[1:]:
                        total = total + extra
                    for te, code in total.terms.items():
                        rows.setdefault((var, k, c, te), {})[col] = code
    ncols = len(unknowns)
    dense = []
    for key in sorted(rows):
        row = [0] * ncols
        for col, code in rows[key].items():
            row[col] = code
        dense.append(row)
    if dense:
        basis = gf.kernel(spec, dense, ncols)
    else:
        basis = gf.identity(ncols)
    out = []
    for vec in reversed(basis):
        sec = [dict() for _ in range(r)]
        for col, code in enumerate(vec):
            if code:
                j, e = unknowns[col]
                sec[j][e] = code
        out.append(tuple(Poly._make(ring, t) for t in sec))
    return out


@dataclass(frozen=True)
class TrivializationCertificate:
    gauge: GaugeMatrix
    checked_order_bound: int
    minimal_degree: int

    def revalidate(self, M: StratifiedModule) -> bool:
        return gauge_transform(M, self.gauge).is_trivial()


def _gauge_degree(U: GaugeMatrix, fvars: Sequence[str]) -> int:
    degs = [U.degree(v) for v in fvars]
    degs = [int(d) for d in degs if d != float("-inf")]
    return max(degs, default=0)


def trivialize(M: StratifiedModule, deg_bound: int) -> TrivializationCertificate:
    """Smallest-degree trivializing gauge, normalized so that it is I at the origin.

    Raises NotFoundWithinBound when no gauge of degree <= deg_bound exists;
    that says nothing about triviality with larger gauges.
    """
    if M.base_vars:
        raise HasBaseVariables("restrict to a fiber before trivializing")
    r = M.rank
    spec = M.spec
    origin = {v: 0 for v in M.fiber_vars}
    for bound in range(deg_bound + 1):
        secs = horizontal_sections(M, bound)
        if len(secs) < r:
            continue
        rows = mx.as_matrix(secs[:r])
        at0 = [[f.evaluate(origin).constant_code() for f in row] for row in rows]
        try:
            inv0 = gf.inverse(spec, at0)
        except gf.Singular:
            continue
        ring = M.ring
        C = tuple(tuple(ring.const(spec.element(c)) for c in row) for row in inv0)
        U = GaugeMatrix(mx.mul(C, rows))
        deg = _gauge_degree(U, M.fiber_vars)
        cert = TrivializationCertificate(U, deg + M.max_order(), deg)
        if not cert.revalidate(M):
            raise AssertionError("horizontal basis failed to trivialize")  # pragma: no cover
        return cert
    raise NotFoundWithinBound(f"no trivializing gauge of degree <= {deg_bound}")


# ---------------------------------------------------------------------------
# The family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    field: FieldSpec
    points: tuple

    def __post_init__(self):
        pts = tuple(self.field(a) for a in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(a.code for a in pts)) != len(pts):
            raise DuplicatePoints("family points must be pairwise distinct")

    @property
    def level(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "points": [a.digits for a in self.points]}

    @classmethod
    def from_json(cls, doc) -> "FamilySpec":
        field = FieldSpec.from_json(doc["field"])
        return cls(field, tuple(FieldElement(field, d) for d in doc["points"]))


def family_ring(field: FieldSpec) -> PolyRing:
    return PolyRing(field, ("x", "y"))


def make_family(spec: FamilySpec) -> StratifiedModule:
    ring = family_ring(spec.field)
    x, y = ring.gens()
    z = ring.zero
    p = spec.field.p
    support = {}
    prod = ring.one
    for h, a in enumerate(spec.points):
        prod = prod * (y - a)
        support[("x", p ** h)] = ((z, z), (prod, z))
    return StratifiedModule(ring, ("y",), ("x",), 2, support)


def explicit_gauge(spec: FamilySpec, n: int) -> GaugeMatrix:
    """Lower-unitriangular gauge trivializing the fiber over a_n.

    Its (2,1) entry is -sum_{h<n} [prod_{i<=h} (y - a_i)] x^(p^h) at y = a_n.
    """
    if not 0 <= n < spec.level:
        raise IndexOutOfRange(f"n={n} outside 0..{spec.level - 1}")
    ring = family_ring(spec.field)
    x, y = ring.gens()
    p = spec.field.p
    entry = ring.zero
    prod = ring.one
    for h in range(n):
        prod = prod * (y - spec.points[h])
        entry = entry - prod * x ** (p ** h)
    entry = entry.substitute("y", spec.points[n])
    fring = entry.ring
    return GaugeMatrix(((fring.one, fring.zero), (entry, fring.one)))


@dataclass(frozen=True)
class FiberResult:
    n: int
    point: FieldElement
    fiber: StratifiedModule
    certificate: TrivializationCertificate


def family_fibers(spec: FamilySpec) -> list[FiberResult]:
    """Restrict the family to each a_n and trivialize with bound p^M."""
    E = make_family(spec)
    bound = spec.field.p ** spec.level
    out = []
    for n, a in enumerate(spec.points):
        fiber = restrict_fiber(E, {"y": a})
        out.append(FiberResult(n, a, fiber, trivialize(fiber, bound)))
    return out


def gauge_degree_profile(spec: FamilySpec) -> list[tuple[int, int]]:
    return [(res.n, res.certificate.minimal_degree) for res in family_fibers(spec)]


def profile_csv(profile: Sequence[tuple[int, int]]) -> str:
    return "".join(f"{n},{d}\n" for n, d in profile)
