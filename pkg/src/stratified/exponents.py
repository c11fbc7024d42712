"""Exponents of logarithmic modules at a boundary point, and bounded log-extension search.

On the divisor x = 0 of a curve, the operators x^(p^h) ∂^(p^h) act on the
fiber by constant matrices B[h].  On a joint eigenspace they act by
C(alpha, p^h) ≡ alpha_h (mod p) for a p-adic alpha, so the eigenvalue of B[h]
is the h-th base-p digit of the exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import gf
from .diffop import DigitVector, binom_mod_p
from .errors import (
    MultipleFiberVariables,
    NoSolution,
    NotCommuting,
    NotDecomposable,
    NotFoundWithinBound,
    UnsupportedShape,
    WindowTooLarge,
)
from .gf import FieldSpec
from .poly import POS_INFINITY
from .stratmod import GaugeMatrix, StratifiedModule, gauge_transform_truncated


def _to_codes(field: FieldSpec, mat) -> tuple[tuple[int, ...], ...]:
    out = []
    for row in mat:
        out.append(tuple(field(x).code if not isinstance(x, int) else x % field.p for x in row))
    return tuple(out)


class LogModule:
    """Commuting constant matrices B[0..H] for x^(p^h) ∂^(p^h) on the divisor."""

    __slots__ = ("field", "rank", "H", "B")

    def __init__(self, field: FieldSpec, rank: int, H: int, B: Sequence):
        if len(B) != H + 1:
            raise ValueError(f"expected {H + 1} matrices, got {len(B)}")
        mats = []
        for h, mat in enumerate(B):
            if isinstance(mat, dict):
                raise TypeError("B must be a sequence indexed by h")
            codes = _to_codes(field, mat)
            if len(codes) != rank or any(len(r) != rank for r in codes):
                raise ValueError(f"B[{h}] is not {rank}x{rank}")
            mats.append(codes)
        for i, a in enumerate(mats):
            for b in mats[i + 1:]:
                if gf.matmul(field, a, b) != gf.matmul(field, b, a):
                    raise NotCommuting("the matrices B[h] must pairwise commute")
        self.field = field
        self.rank = rank
        self.H = H
        self.B = tuple(mats)

    @classmethod
    def from_exponents(cls, field: FieldSpec, exponents: Sequence[DigitVector]) -> "LogModule":
        """Diagonal presentation with one eigenline per exponent."""
        H = len(exponents[0]) - 1
        r = len(exponents)
        B = []
        for h in range(H + 1):
            B.append([[exponents[i][h] if i == j else 0 for j in range(r)] for i in range(r)])
        return cls(field, r, H, B)

    def conjugate(self, P) -> "LogModule":
        """Presentation in the basis given by the rows of the invertible matrix P."""
        P = [list(r) for r in _to_codes(self.field, P)]
        Pinv = gf.inverse(self.field, P)
        F = self.field
        mats = [gf.matmul(F, gf.matmul(F, P, b), Pinv) for b in self.B]
        return LogModule(F, self.rank, self.H,
                         [[[F.element(c) for c in row] for row in m] for m in mats])

    def to_json(self) -> dict:
        F = self.field
        return {
            "field": F.to_json(),
            "rank": self.rank,
            "H": self.H,
            "B": [[[list(F.digits_of(c)) for c in row] for row in b] for b in self.B],
        }

    @classmethod
    def from_json(cls, doc) -> "LogModule":
        from .serial import log_module_from_json

        return log_module_from_json(doc)

    def __eq__(self, other):
        return (isinstance(other, LogModule) and self.field == other.field
                and self.rank == other.rank and self.B == other.B)


@dataclass(frozen=True)
class TorsionClass:
    kind: str  # zero | integer-torsion | periodic | inconclusive
    period: int | None = None

    @property
    def is_torsion(self) -> bool:
        return self.kind != "inconclusive"

    def __str__(self):
        return f"periodic({self.period})" if self.kind == "periodic" else self.kind


MIN_REPEATS = 2


def torsion_class(digits: DigitVector, window: int) -> TorsionClass:
    """Classify the first ``window`` digits.

    A tail counts as periodic with period d only if at least two full
    copies of it fit inside the window.  The label describes the window,
    it is not a proof that the exponent is rational.
    """
    if window > len(digits):
        raise WindowTooLarge(f"window {window} exceeds digit length {len(digits)}")
    if window < 0:
        raise ValueError("window must be >= 0")
    ds = digits.digits[:window]
    if all(d == 0 for d in ds):
        return TorsionClass("zero")
    n = len(ds)
    for d in range(1, n // MIN_REPEATS + 1):
        for start in range(0, n - MIN_REPEATS * d + 1):
            if all(ds[i] == ds[i + d] for i in range(start, n - d)):
                if d == 1 and ds[-1] in (0, digits.p - 1):
                    return TorsionClass("integer-torsion", 1)
                return TorsionClass("periodic", d)
    return TorsionClass("inconclusive")


@dataclass(frozen=True)
class ExponentEntry:
    digits: DigitVector
    multiplicity: int
    classification: TorsionClass
    basis: tuple = ()


@dataclass(frozen=True)
class ExponentRecord:
    entries: tuple

    @property
    def total(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def digit_multiset(self) -> list[tuple[tuple[int, ...], int]]:
        return [(e.digits.digits, e.multiplicity) for e in self.entries]


def exponent_digits(L: LogModule, window: int | None = None) -> ExponentRecord:
    """Simultaneously diagonalize the B[h] with eigenvalues in F_p."""
    F = L.field
    pieces = gf.joint_eigenspaces(F, L.B, range(F.p))
    if pieces is None:
        raise NotDecomposable("some B[h] is not diagonalizable with eigenvalues in F_p")
    window = L.H + 1 if window is None else window
    entries = []
    for label, basis in sorted(pieces, key=lambda item: item[0]):
        dv = DigitVector(F.p, label)
        entries.append(ExponentEntry(dv, len(basis), torsion_class(dv, window),
                                     tuple(tuple(r) for r in basis)))
    return ExponentRecord(tuple(entries))


def log_module_for_alpha(field: FieldSpec, alpha_binom, H: int) -> LogModule:
    """Rank-one LogModule with B[h] = alpha_binom(p^h) mod p."""
    p = field.p
    return LogModule(field, 1, H, [[[alpha_binom(p ** h) % p]] for h in range(H + 1)])


# ---------------------------------------------------------------------------
# Pole orders and log extensions
# ---------------------------------------------------------------------------


def _single_fiber(M: StratifiedModule) -> str:
    if len(M.fiber_vars) != 1:
        raise MultipleFiberVariables("expected exactly one fiber variable")
    return M.fiber_vars[0]


def log_pole_order(M: StratifiedModule, cutoff: int) -> int:
    """max_{k <= cutoff} -min(0, val_t(t^k A_k)); 0 means already logarithmic."""
    t = _single_fiber(M)
    worst = 0
    for (var, k), A in M.support.items():
        if k > cutoff:
            continue
        for row in A:
            for f in row:
                v = f.valuation(t)
                if v != POS_INFINITY:
                    worst = max(worst, -(k + v))
    return worst


def _is_strictly_lower(M: StratifiedModule) -> bool:
    return all(not A[i][j].terms for A in M.support.values()
               for i in range(M.rank) for j in range(i, M.rank))


def search_log_extension(M: StratifiedModule, deg_range: int, cutoff: int | None = None) -> GaugeMatrix:
    """Lower-unitriangular gauge [[1,0],[g,1]] making the presentation logarithmic.

    ``g`` ranges over Laurent polynomials with t-degrees in [-deg_range,
    deg_range].  For this shape the gauged (2,1) entries are a_k + ∂^(k) g, so
    the conditions are linear in the coefficients of g and are solved, not
    enumerated.  Orders 1..cutoff are examined (default: the maximal support
    order of M); orders above cutoff are not.
    """
    t = _single_fiber(M)
    if M.rank > 2 or not _is_strictly_lower(M):
        raise UnsupportedShape("need a rank <= 2 module with strictly lower-triangular support")
    if M.base_vars:
        raise UnsupportedShape("restrict to a fiber first")
    if deg_range < 0:
        raise ValueError("deg_range must be >= 0")
    ring = M.ring
    F = ring.spec
    cutoff = M.max_order() if cutoff is None else cutoff
    ident = GaugeMatrix.identity(ring, M.rank)
    if log_pole_order(M, cutoff) == 0:
        return ident
    ti = ring.index(t)
    exps = list(range(-deg_range, deg_range + 1))
    # row key: (k, e') for e' < 0; unknown g_e contributes C(e, k) at e' = e
    rows: dict[tuple[int, int], list[int]] = {}
    rhs: dict[tuple[int, int], int] = {}
    for k in range(1, cutoff + 1):
        A = M.support.get((t, k))
        if A is not None:
            for e, c in A[1][0].terms.items():
                ep = e[ti] + k
                if ep < 0:
                    rhs[(k, ep)] = F.add(rhs.get((k, ep), 0), F.neg(c))
                    rows.setdefault((k, ep), [0] * len(exps))
        for col, e in enumerate(exps):
            if e < 0:
                b = binom_mod_p(e, k, F.p)
                if b:
                    rows.setdefault((k, e), [0] * len(exps))[col] = b
    keys = sorted(rows)
    try:
        sol, _ = gf.solve(F, [rows[key] for key in keys], [rhs.get(key, 0) for key in keys], len(exps))
    except NoSolution:
        raise NotFoundWithinBound(
            f"no gauge with t-degrees in [-{deg_range}, {deg_range}] is logarithmic up to order {cutoff}"
        ) from None
    g = ring.zero
    for col, code in enumerate(sol):
        if code:
            g = g + ring.monomial({t: exps[col]}, F.element(code))
    U = GaugeMatrix(((ring.one, ring.zero), (g, ring.one)))
    check = gauge_transform_truncated(M, U, cutoff)
    if log_pole_order(check, cutoff) != 0:
        raise AssertionError("solved gauge is not logarithmic")  # pragma: no cover
    return U
