"""Relative stratified modules presented by generator matrices.

A module of rank r on ``K[fiber vars, base vars]`` is given by matrices
``A[i, k]`` (fiber variable ``i``, order ``k >= 1``) with the row convention

    ∂_i^(k)(e_m) = sum_j A[i, k][m][j] e_j,

and ``A[i, 0] = I``.  A section with coefficient row ``f`` is sent to
``sum_{a+b=k} ∂_i^(a)(f) · A[i, b]``.  Orders missing from the support act as
zero.  Only truncated outputs (:func:`invert_coordinate`,
:func:`gauge_transform_truncated`, ``dual(M, cutoff)``) leave higher orders
unknown, and they say so through ``valid_up_to``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import matrices as mx
from .diffop import binom_mod_p, divided_partial, partial_matrix
from .errors import (
    CutoffTooSmall,
    MissingAssignment,
    ModuleError,
    MultipleFiberVariables,
    NoEmbedding,
    NotLaurent,
    NotUnimodular,
    ProbeCheckFailed,
    RingMismatch,
    UnknownVariable,
)
from .gf import FieldElement, FieldSpec
from .poly import Poly, PolyRing

Key = tuple  # (fiber variable name, order)


class StratifiedModule:
    """Immutable presentation ``(ring, base_vars, fiber_vars, rank, support)``."""

    __slots__ = ("ring", "base_vars", "fiber_vars", "rank", "support", "valid_up_to")

    def __init__(self, ring: PolyRing, base_vars: Sequence[str], fiber_vars: Sequence[str],
                 rank: int, support: Mapping[Key, Sequence[Sequence[Poly]]] | None = None,
                 valid_up_to: int | None = None):
        base_vars = tuple(base_vars)
        fiber_vars = tuple(fiber_vars)
        if set(base_vars) & set(fiber_vars):
            raise ModuleError("a variable cannot be both base and fiber")
        if sorted(base_vars + fiber_vars) != sorted(ring.vars):
            raise ModuleError("base and fiber variables must partition the ring variables")
        if rank < 1:
            raise ModuleError("rank must be >= 1")
        clean = {}
        for (var, k), mat in (support or {}).items():
            if var not in fiber_vars:
                raise UnknownVariable(f"{var!r} is not a fiber variable")
            if not isinstance(k, int) or k < 1:
                raise ModuleError(f"support orders must be >= 1, got {k}")
            mat = mx.as_matrix(mat)
            if len(mat) != rank or any(len(row) != rank for row in mat):
                raise ModuleError(f"matrix at {(var, k)} is not {rank}x{rank}")
            for row in mat:
                for f in row:
                    if not isinstance(f, Poly) or f.ring != ring:
                        raise RingMismatch(f"entry of matrix {(var, k)} is not in {ring}")
            if not mx.is_zero(mat):
                clean[(var, k)] = mat
        self.ring = ring
        self.base_vars = base_vars
        self.fiber_vars = fiber_vars
        self.rank = rank
        self.support = dict(sorted(clean.items()))
        self.valid_up_to = valid_up_to

    @classmethod
    def trivial(cls, ring: PolyRing, base_vars: Sequence[str], fiber_vars: Sequence[str],
                rank: int) -> "StratifiedModule":
        return cls(ring, base_vars, fiber_vars, rank, {})

    @property
    def spec(self) -> FieldSpec:
        return self.ring.spec

    def matrix(self, var: str, k: int) -> mx.Matrix:
        if k == 0:
            return mx.identity(self.ring, self.rank)
        got = self.support.get((var, k))
        return got if got is not None else mx.zero(self.ring, self.rank)

    def orders(self, var: str) -> list[int]:
        return [k for (v, k) in self.support if v == var]

    def max_order(self, var: str | None = None) -> int:
        ks = [k for (v, k) in self.support if var is None or v == var]
        return max(ks, default=0)

    def is_trivial(self) -> bool:
        return not self.support

    def same_shape(self, other: "StratifiedModule") -> bool:
        return (self.ring == other.ring and self.base_vars == other.base_vars
                and self.fiber_vars == other.fiber_vars)

    def __eq__(self, other):
        if not isinstance(other, StratifiedModule):
            return NotImplemented
        return (self.same_shape(other) and self.rank == other.rank
                and self.support == other.support and self.valid_up_to == other.valid_up_to)

    def __hash__(self):
        return hash((self.ring, self.rank, tuple(self.support)))

    def __repr__(self):
        keys = ", ".join(f"{v}^({k})" for v, k in self.support)
        return (f"StratifiedModule(rank={self.rank}, base={list(self.base_vars)}, "
                f"fiber={list(self.fiber_vars)}, support=[{keys}])")


class GaugeMatrix:
    """Basis change ``e'_i = sum_j U[i][j] e_j`` with ``det U`` a nonzero constant."""

    __slots__ = ("ring", "matrix", "det", "_inverse")

    def __init__(self, matrix: Sequence[Sequence[Poly]]):
        matrix = mx.as_matrix(matrix)
        n = len(matrix)
        if n == 0 or any(len(row) != n for row in matrix):
            raise ModuleError("gauge must be a nonempty square matrix")
        ring = matrix[0][0].ring
        for row in matrix:
            for f in row:
                if f.ring != ring:
                    raise RingMismatch("gauge entries live in different rings")
        d = mx.det(matrix)
        if not d.is_constant() or d.is_zero():
            raise NotUnimodular(f"determinant {d} is not a nonzero constant")
        self.ring = ring
        self.matrix = matrix
        self.det = d.constant_code()
        self._inverse = None

    @classmethod
    def identity(cls, ring: PolyRing, n: int) -> "GaugeMatrix":
        return cls(mx.identity(ring, n))

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def inverse(self) -> "GaugeMatrix":
        if self._inverse is None:
            inv_det = self.ring.spec.inv(self.det)
            inv = GaugeMatrix(mx.apply(mx.adjugate(self.matrix), lambda f: f.scale(inv_det)))
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def degree(self, var: str):
        return mx.degree(self.matrix, var)

    def evaluate(self, point: Mapping[str, object]) -> "GaugeMatrix":
        return GaugeMatrix(mx.apply(self.matrix, lambda f: f.evaluate(point)))

    def __getitem__(self, ij):
        i, j = ij
        return self.matrix[i][j]

    def __eq__(self, other):
        return isinstance(other, GaugeMatrix) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return "GaugeMatrix(" + repr([list(r) for r in self.matrix]) + ")"


# ---------------------------------------------------------------------------
# Action on sections
# ---------------------------------------------------------------------------


def _check_fiber(M: StratifiedModule, var: str) -> None:
    M.ring.index(var)
    if var not in M.fiber_vars:
        raise UnknownVariable(f"{var!r} is not a fiber variable")


def apply_operator(M: StratifiedModule, s: Sequence[Poly], var: str, k: int) -> tuple[Poly, ...]:
    """Φ_{var,k}(sum_j s_j e_j) as a coefficient row."""
    _check_fiber(M, var)
    s = tuple(s)
    if len(s) != M.rank:
        raise ModuleError(f"section has {len(s)} entries, rank is {M.rank}")
    for f in s:
        if f.ring != M.ring:
            raise RingMismatch("section entry is not in the module ring")
    if k == 0:
        return s
    acc = [M.ring.zero] * M.rank
    for a in range(k + 1):
        b = k - a
        A = M.support.get((var, b)) if b else None
        if b and A is None:
            continue
        da = tuple(divided_partial(f, var, a) for f in s)
        if not any(f.terms for f in da):
            continue
        term = da if b == 0 else mx.vec_mul(da, A)
        acc = [x + y for x, y in zip(acc, term)]
    return tuple(acc)


# ---------------------------------------------------------------------------
# Relation check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    i: str
    j: str
    k: int
    l: int
    difference: tuple

    def describe(self) -> str:
        return f"({self.rule}, i={self.i}, j={self.j}, k={self.k}, l={self.l})"


@dataclass
class RelationReport:
    cutoff: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed


class _Partials:
    """Memoized ∂_var^(a)(A[w, l])."""

    def __init__(self, M: StratifiedModule):
        self.M = M
        self.cache = {}
        self.degs = {}

    def get(self, var, a, w, l):
        key = (var, a, w, l)
        hit = self.cache.get(key)
        if hit is None:
            A = self.M.support.get((w, l))
            if A is None:
                hit = False
            else:
                if (var, w, l) not in self.degs:
                    self.degs[(var, w, l)] = mx.degree(A, var)
                if a > self.degs[(var, w, l)] and not self.M.ring.is_laurent(var):
                    hit = False
                else:
                    D = partial_matrix(A, var, a) if a else A
                    hit = False if mx.is_zero(D) else D
            self.cache[key] = hit
        return hit


def _expand(M: StratifiedModule, P: _Partials, di: str, w: str, l: int, k: int):
    """sum_{a+b=k} ∂_di^(a)(A[w, l]) · A[di, b]; None when zero."""
    acc = None
    for a in range(k + 1):
        b = k - a
        D = P.get(di, a, w, l)
        if D is False:
            continue
        if b == 0:
            term = D
        else:
            A = M.support.get((di, b))
            if A is None:
                continue
            term = mx.mul(D, A)
        acc = term if acc is None else mx.add(acc, term)
    return acc


def verify_relations(M: StratifiedModule, cutoff: int) -> RelationReport:
    """Check the defining relations of the divided-power operator ring up to ``cutoff``.

    R1: Φ_{i,k}Φ_{i,l} = C(k+l,k) Φ_{i,k+l} for k, l >= 1, k + l <= cutoff.
    R2: Φ_{i,k}Φ_{j,l} = Φ_{j,l}Φ_{i,k} for i != j, k, l <= cutoff.
    R3: [Φ_{i,k}, x_i] = Φ_{i,k-1} and [Φ_{j,k}, x_i] = 0 on the probes x_i e_m.
    """
    if cutoff < M.max_order():
        raise CutoffTooSmall(f"cutoff {cutoff} is below the maximal support order {M.max_order()}")
    if M.valid_up_to is not None and cutoff > M.valid_up_to:
        raise ModuleError(f"presentation is only known up to order {M.valid_up_to}")
    report = RelationReport(cutoff)
    P = _Partials(M)
    p = M.spec.p
    r = M.rank
    zero = mx.zero(M.ring, r)
    for i in M.fiber_vars:
        for l in range(1, cutoff):
            for k in range(1, cutoff - l + 1):
                lhs = _expand(M, P, i, i, l, k)
                c = binom_mod_p(k + l, k, p)
                rhs = M.support.get((i, k + l)) if c else None
                if rhs is not None and c != 1:
                    rhs = mx.apply(rhs, lambda f: f.scale(c))
                if lhs is None and rhs is None:
                    continue
                diff = mx.sub(lhs or zero, rhs or zero)
                if not mx.is_zero(diff):
                    report.violations.append(Violation("R1", i, i, k, l, diff))
    for n, i in enumerate(M.fiber_vars):
        for j in M.fiber_vars[n + 1:]:
            for k in range(1, cutoff + 1):
                for l in range(1, cutoff + 1):
                    lhs = _expand(M, P, i, j, l, k)
                    rhs = _expand(M, P, j, i, k, l)
                    if lhs is None and rhs is None:
                        continue
                    diff = mx.sub(lhs or zero, rhs or zero)
                    if not mx.is_zero(diff):
                        report.violations.append(Violation("R2", i, j, k, l, diff))
    basis = mx.identity(M.ring, r)
    for i in M.fiber_vars:
        xi = M.ring.gen(i)
        for m in range(r):
            em = basis[m]
            probe = tuple(f * xi for f in em)
            for j in M.fiber_vars:
                prev = em
                for k in range(1, cutoff + 1):
                    cur = apply_operator(M, em, j, k)
                    lhs = apply_operator(M, probe, j, k)
                    rhs = tuple(f * xi for f in cur)
                    if j == i:
                        rhs = tuple(x + y for x, y in zip(rhs, prev))
                    diff = tuple(x - y for x, y in zip(lhs, rhs))
                    if any(f.terms for f in diff):
                        report.violations.append(Violation("R3", i, j, k, 0, diff))
                    prev = cur
    return report


# ---------------------------------------------------------------------------
# Basis change and restriction
# ---------------------------------------------------------------------------


def gauge_transform(M: StratifiedModule, U: GaugeMatrix) -> StratifiedModule:
    """Presentation in the basis ``e'_i = sum_j U[i][j] e_j``.

    A'[i,k] = [sum_{a+b=k} ∂_i^(a)(U) · A[i,b]] · U^{-1}.  Orders above
    deg_i(U) + max order vanish, since every term then has either
    ∂^(a)(U) = 0 or A[i,b] = 0.
    """
    if not isinstance(U, GaugeMatrix):
        U = GaugeMatrix(U)
    if U.ring != M.ring:
        raise RingMismatch("gauge and module live in different rings")
    if U.rank != M.rank:
        raise ModuleError("gauge rank differs from module rank")
    Uinv = U.inverse().matrix
    support = {}
    for i in M.fiber_vars:
        du = U.degree(i)
        if M.ring.is_laurent(i) and any(f.valuation(i) < 0 for row in U.matrix for f in row if f.terms):
            raise ModuleError("gauge_transform needs gauges polynomial in the fiber variables")
        bound = M.max_order(i) + (du if du != float("-inf") else 0)
        partials = {}
        for k in range(1, int(bound) + 1):
            acc = None
            for a in range(k + 1):
                b = k - a
                if a not in partials:
                    D = partial_matrix(U.matrix, i, a) if a else U.matrix
                    partials[a] = None if mx.is_zero(D) else D
                D = partials[a]
                if D is None:
                    continue
                if b == 0:
                    term = D
                else:
                    A = M.support.get((i, b))
                    if A is None:
                        continue
                    term = mx.mul(D, A)
                acc = term if acc is None else mx.add(acc, term)
            if acc is None:
                continue
            new = mx.mul(acc, Uinv)
            if not mx.is_zero(new):
                support[(i, k)] = new
    return StratifiedModule(M.ring, M.base_vars, M.fiber_vars, M.rank, support, M.valid_up_to)


def gauge_transform_truncated(M: StratifiedModule, U: GaugeMatrix, cutoff: int) -> StratifiedModule:
    """Orders 1..cutoff of the gauged presentation, for gauges that may have
    poles in a Laurent fiber variable (where no finite order bound exists)."""
    if not isinstance(U, GaugeMatrix):
        U = GaugeMatrix(U)
    if U.ring != M.ring:
        raise RingMismatch("gauge and module live in different rings")
    Uinv = U.inverse().matrix
    support = {}
    for i in M.fiber_vars:
        for k in range(1, cutoff + 1):
            acc = None
            for a in range(k + 1):
                b = k - a
                D = partial_matrix(U.matrix, i, a) if a else U.matrix
                if b:
                    A = M.support.get((i, b))
                    if A is None:
                        continue
                    D = mx.mul(D, A)
                acc = D if acc is None else mx.add(acc, D)
            new = mx.mul(acc, Uinv)
            if not mx.is_zero(new):
                support[(i, k)] = new
    return StratifiedModule(M.ring, M.base_vars, M.fiber_vars, M.rank, support, valid_up_to=cutoff)


def restrict_fiber(M: StratifiedModule, point: Mapping[str, object]) -> StratifiedModule:
    """Specialize every base variable to a field element."""
    for var in point:
        if var not in M.base_vars:
            raise UnknownVariable(f"{var!r} is not a base variable")
    missing = [v for v in M.base_vars if v not in point]
    if missing:
        raise MissingAssignment(f"no value given for base variable(s) {missing}")
    ring = M.ring
    for var in M.base_vars:
        ring = ring.drop(var)
    ordered = [(v, point[v]) for v in M.base_vars]

    def spec_at(f: Poly) -> Poly:
        for v, val in ordered:
            f = f.substitute(v, val)
        return f

    support = {key: mx.apply(A, spec_at) for key, A in M.support.items()}
    return StratifiedModule(ring, (), M.fiber_vars, M.rank, support, M.valid_up_to)


def restrict_gauge(U: GaugeMatrix, point: Mapping[str, object]) -> GaugeMatrix:
    return U.evaluate(point)


# ---------------------------------------------------------------------------
# Category operations
# ---------------------------------------------------------------------------


def dual(M: StratifiedModule, cutoff: int | None = None) -> StratifiedModule:
    """Dual module: D_0 = I, D_k = -sum_{a<k} D_a · A_{k-a}^T per fiber variable.

    For a valid presentation the generating series of the D_k is a polynomial
    of degree at most max_k (k + deg A_k); the recursion stops there and the
    remaining identities are checked explicitly.  With ``cutoff`` the
    recursion runs to that order only, skips the closing check, and the
    result is marked valid up to ``cutoff``.
    """
    r = M.rank
    ring = M.ring
    support = {}
    for i in M.fiber_vars:
        orders = M.orders(i)
        if not orders:
            continue
        At = {k: mx.transpose(M.support[(i, k)]) for k in orders}
        bound = max(k + max(0, int(mx.degree(M.support[(i, k)], i))) for k in orders)
        if cutoff is not None:
            bound = cutoff
        D = {0: mx.identity(ring, r)}
        for k in range(1, bound + 1):
            acc = None
            for b in orders:
                if b > k:
                    break
                a = k - b
                if a in D:
                    term = mx.mul(D[a], At[b])
                    acc = term if acc is None else mx.add(acc, term)
            if acc is not None:
                acc = mx.neg(acc)
                if not mx.is_zero(acc):
                    D[k] = acc
        top = max(orders) if cutoff is None else 0
        for k in range(bound + 1, bound + top + 1):
            acc = None
            for b in orders:
                a = k - b
                if a in D:
                    term = mx.mul(D[a], At[b])
                    acc = term if acc is None else mx.add(acc, term)
            if acc is not None and not mx.is_zero(acc):
                raise ModuleError("dual does not close up: the presentation violates the relations")
        for k, mat in D.items():
            if k:
                support[(i, k)] = mat
    valid = M.valid_up_to if cutoff is None else _combine_valid(M.valid_up_to, cutoff)
    return StratifiedModule(ring, M.base_vars, M.fiber_vars, r, support, valid)


def _combine_valid(a, b):
    vals = [v for v in (a, b) if v is not None]
    return min(vals) if vals else None


def tensor(M: StratifiedModule, N: StratifiedModule) -> StratifiedModule:
    """T[i,k] = sum_{a+b=k} A[i,a] ⊗ B[i,b]; basis e_m ⊗ f_n has index m*rank(N) + n."""
    if not M.same_shape(N):
        raise RingMismatch("tensor needs the same ring and variable split")
    support = {}
    for i in M.fiber_vars:
        top = M.max_order(i) + N.max_order(i)
        for k in range(1, top + 1):
            acc = None
            for a in range(k + 1):
                b = k - a
                if a and (i, a) not in M.support:
                    continue
                if b and (i, b) not in N.support:
                    continue
                term = mx.kron(M.matrix(i, a), N.matrix(i, b))
                acc = term if acc is None else mx.add(acc, term)
            if acc is not None and not mx.is_zero(acc):
                support[(i, k)] = acc
    return StratifiedModule(M.ring, M.base_vars, M.fiber_vars, M.rank * N.rank, support,
                            _combine_valid(M.valid_up_to, N.valid_up_to))


def direct_sum(M: StratifiedModule, N: StratifiedModule) -> StratifiedModule:
    if not M.same_shape(N):
        raise RingMismatch("direct sum needs the same ring and variable split")
    support = {}
    keys = sorted(set(M.support) | set(N.support))
    for key in keys:
        i, k = key
        support[key] = mx.block_diag(M.matrix(i, k), N.matrix(i, k))
    return StratifiedModule(M.ring, M.base_vars, M.fiber_vars, M.rank + N.rank, support,
                            _combine_valid(M.valid_up_to, N.valid_up_to))


# ---------------------------------------------------------------------------
# Scalar extension
# ---------------------------------------------------------------------------


def find_embedding(source: FieldSpec, target: FieldSpec) -> list[int]:
    """Code table of the embedding sending T to the lexicographically least root
    of the source modulus in the target field."""
    if source.p != target.p or target.m % source.m:
        raise NoEmbedding(f"{source} does not embed in {target}")
    if source.m == 1:
        return list(range(source.p))
    root = None
    for code in target.codes_sorted_lex():
        acc = 0
        for c in reversed(source.modulus):
            acc = target.add(target.mul(acc, code), c)
        if acc == 0:
            root = code
            break
    if root is None:
        raise NoEmbedding(f"modulus of {source} has no root in {target}")
    powers = [target.pow(root, i) for i in range(source.m)]
    table = []
    for code in range(source.q):
        acc = 0
        for d, pw in zip(source.digits_of(code), powers):
            if d:
                acc = target.add(acc, target.mul(d, pw))
        table.append(acc)
    return table


def extend_scalars(M: StratifiedModule, target: FieldSpec) -> StratifiedModule:
    if target == M.spec:
        return M
    table = find_embedding(M.spec, target)
    ring = M.ring.with_field(target)
    support = {key: mx.apply(A, lambda f: f.map_coeffs(ring, table.__getitem__))
               for key, A in M.support.items()}
    return StratifiedModule(ring, M.base_vars, M.fiber_vars, M.rank, support, M.valid_up_to)


# ---------------------------------------------------------------------------
# Coordinate inversion t = 1/x
# ---------------------------------------------------------------------------


def inversion_coefficients(ring: PolyRing, t: str, cutoff: int) -> dict[tuple[int, int], Poly]:
    """c[k, j] with ∂_t^(k) = sum_{j<=k} c[k, j] ∂_x^(j), where x = 1/t.

    Found by forward substitution on the probes x^m = t^-m, m = 0..k, for which
    the system is unit lower triangular because ∂_x^(j)(x^m) = C(m, j) x^(m-j).
    """
    p = ring.spec.p
    coeffs = {(0, 0): ring.one}
    for k in range(1, cutoff + 1):
        for m in range(k + 1):
            val = ring.monomial({t: -m - k}, binom_mod_p(-m, k, p))
            for j in range(m):
                c = coeffs.get((k, j))
                if c is not None and c.terms:
                    b = binom_mod_p(m, j, p)
                    if b:
                        val = val - c * ring.monomial({t: j - m}, b)
            coeffs[(k, m)] = val
    return coeffs


def invert_coordinate(M: StratifiedModule, cutoff: int, new_var: str = "t") -> StratifiedModule:
    """Rewrite the presentation in the coordinate t = 1/x, exact for orders <= cutoff."""
    if len(M.fiber_vars) != 1:
        raise MultipleFiberVariables("coordinate inversion needs exactly one fiber variable")
    x = M.fiber_vars[0]
    if not M.ring.is_laurent(x):
        raise NotLaurent(f"fiber variable {x!r} must be Laurent")
    if cutoff < M.max_order():
        raise CutoffTooSmall(f"cutoff {cutoff} is below the maximal support order {M.max_order()}")
    if new_var != x and new_var in M.ring:
        raise ModuleError(f"variable name {new_var!r} already used")
    xi = M.ring.index(x)
    vars_ = list(M.ring.vars)
    vars_[xi] = new_var
    tring = PolyRing(M.spec, vars_, M.ring.laurent)

    def flip(e):
        return e[:xi] + (-e[xi],) + e[xi + 1:]

    def to_t(f: Poly) -> Poly:
        return f.map_exps(tring, flip)

    def to_x(f: Poly) -> Poly:
        return f.map_exps(M.ring, flip)

    coeffs = inversion_coefficients(tring, new_var, cutoff)
    p = M.spec.p
    # defining property on probe monomials t^m
    for k in range(cutoff + 1):
        for m in range(-2 * cutoff, 2 * cutoff + 1):
            probe = M.ring.monomial({x: -m})
            got = tring.zero
            for j in range(k + 1):
                c = coeffs.get((k, j))
                if c is not None and c.terms:
                    got = got + c * to_t(divided_partial(probe, x, j))
            want = tring.monomial({new_var: m - k}, binom_mod_p(m, k, p))
            if got != want:
                raise ProbeCheckFailed(f"operator identity fails at k={k}, probe t^{m}")
    r = M.rank
    support = {}
    converted = {k: mx.apply(M.support[(x, k)], to_t) for k in M.orders(x)}
    for k in range(1, cutoff + 1):
        acc = None
        for j in range(k + 1):
            c = coeffs.get((k, j))
            if c is None or not c.terms:
                continue
            A = mx.identity(tring, r) if j == 0 else converted.get(j)
            if A is None:
                continue
            term = mx.scale(A, c)
            acc = term if acc is None else mx.add(acc, term)
        if acc is not None and not mx.is_zero(acc):
            support[(new_var, k)] = acc
    out = StratifiedModule(tring, M.base_vars, (new_var,), r, support, valid_up_to=cutoff)
    # cross-check the new presentation against the old action on sections t^m e_i
    basis = mx.identity(M.ring, r)
    for m in range(-2, 3):
        xm = M.ring.monomial({x: -m})
        for i in range(r):
            sec = tuple(f * xm for f in basis[i])
            tsec = tuple(to_t(f) for f in sec)
            for k in range(1, cutoff + 1):
                lhs = apply_operator(out, tsec, new_var, k)
                rhs = [tring.zero] * r
                for j in range(k + 1):
                    c = coeffs.get((k, j))
                    if c is None or not c.terms:
                        continue
                    img = apply_operator(M, sec, x, j)
                    rhs = [acc + c * to_t(f) for acc, f in zip(rhs, img)]
                if tuple(rhs) != lhs:
                    raise ProbeCheckFailed(f"assembled presentation disagrees at k={k}, section t^{m} e_{i}")
    return out
