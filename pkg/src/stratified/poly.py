"""Sparse multivariate polynomials (optionally Laurent per variable) over a FieldSpec."""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ExponentOverflow,
    FormatError,
    RingMismatch,
    UnknownVariable,
    ZeroAtLaurentVariable,
)
from .gf import FieldElement, FieldSpec

NEG_INFINITY = float("-inf")
POS_INFINITY = float("inf")

_EXP_LIMIT = 2 ** 31


class PolyRing:
    """K[x_1, ..., x_n] with selected variables inverted."""

    __slots__ = ("spec", "vars", "laurent", "_index", "_hash")

    def __init__(self, spec: FieldSpec, vars: Sequence[str], laurent: Sequence[bool] | None = None):
        vars = tuple(vars)
        if laurent is None:
            laurent = (False,) * len(vars)
        laurent = tuple(bool(f) for f in laurent)
        if len(laurent) != len(vars):
            raise ValueError("one laurent flag per variable")
        if any(not isinstance(v, str) or not v for v in vars):
            raise ValueError("variable names must be nonempty strings")
        if len(set(vars)) != len(vars):
            raise ValueError(f"duplicate variable names in {vars}")
        self.spec = spec
        self.vars = vars
        self.laurent = laurent
        self._index = {v: i for i, v in enumerate(vars)}
        self._hash = hash((spec, vars, laurent))

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise UnknownVariable(f"unknown variable {var!r}") from None

    def is_laurent(self, var: str) -> bool:
        return self.laurent[self.index(var)]

    def __contains__(self, var) -> bool:
        return var in self._index

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self._hash == other._hash
                and self.spec == other.spec and self.vars == other.vars
                and self.laurent == other.laurent)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        names = ", ".join(v + ("^±" if l else "") for v, l in zip(self.vars, self.laurent))
        return f"{self.spec}[{names}]"

    # -- element constructors ----------------------------------------------

    @property
    def zero(self) -> "Poly":
        return Poly._make(self, {})

    @property
    def one(self) -> "Poly":
        return self.const(1)

    def const(self, value) -> "Poly":
        code = _code(self.spec, value)
        if not code:
            return self.zero
        return Poly._make(self, {(0,) * self.nvars: code})

    def gen(self, var: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(var)] = 1
        return Poly._make(self, {tuple(e): 1})

    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.gen(v) for v in self.vars)

    def monomial(self, exps: Mapping[str, int] | Sequence[int], coeff=1) -> "Poly":
        if isinstance(exps, Mapping):
            vec = [0] * self.nvars
            for v, e in exps.items():
                vec[self.index(v)] = int(e)
            exps = vec
        return Poly(self, {tuple(exps): coeff})

    def drop(self, var: str) -> "PolyRing":
        i = self.index(var)
        return PolyRing(self.spec, self.vars[:i] + self.vars[i + 1:],
                        self.laurent[:i] + self.laurent[i + 1:])

    def with_field(self, spec: FieldSpec) -> "PolyRing":
        return PolyRing(spec, self.vars, self.laurent)


def _code(spec: FieldSpec, value) -> int:
    if isinstance(value, FieldElement):
        if value.spec != spec:
            raise RingMismatch("coefficient from a different field")
        return value.code
    if isinstance(value, int):
        return value % spec.p
    raise TypeError(f"cannot use {type(value).__name__} as a coefficient")


def _check_exps(ring: PolyRing, exps: tuple[int, ...]) -> None:
    if len(exps) != ring.nvars:
        raise ValueError(f"exponent vector {exps} has wrong length for {ring}")
    for e, lau, v in zip(exps, ring.laurent, ring.vars):
        if not -_EXP_LIMIT < e < _EXP_LIMIT:
            raise ExponentOverflow(f"exponent {e} of {v} exceeds 2^31")
        if e < 0 and not lau:
            raise ValueError(f"negative exponent in non-Laurent variable {v}")


def _out_of_range(terms) -> bool:
    return any(not -_EXP_LIMIT < x < _EXP_LIMIT for e in terms for x in e)


class Poly:
    """Immutable sparse polynomial: mapping exponent vector -> nonzero coefficient code."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Sequence[int], object] | None = None):
        spec = ring.spec
        clean: dict[tuple[int, ...], int] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            _check_exps(ring, exps)
            code = _code(spec, c)
            if code:
                prev = clean.get(exps)
                code = spec.add(prev, code) if prev is not None else code
                if code:
                    clean[exps] = code
                else:
                    del clean[exps]
        self.ring = ring
        self.terms = clean
        self._hash = None

    @classmethod
    def _make(cls, ring: PolyRing, terms: dict) -> "Poly":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._hash = None
        return obj

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_code(self) -> int:
        return self.terms.get((0,) * self.ring.nvars, 0)

    def constant_term(self) -> FieldElement:
        return self.ring.spec.element(self.constant_code())

    def coeff(self, exps: Sequence[int]) -> FieldElement:
        return self.ring.spec.element(self.terms.get(tuple(exps), 0))

    def __len__(self):
        return len(self.terms)

    # -- arithmetic ----------------------------------------------------------

    def _same(self, other: "Poly") -> None:
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._same(other)
            return other
        if isinstance(other, (int, FieldElement)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        add = self.ring.spec.add
        out = dict(self.terms)
        for e, c in other.terms.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = add(prev, c)
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._make(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        if self.ring.spec.p == 2:
            return self
        neg = self.ring.spec.neg
        return Poly._make(self.ring, {e: neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, code: int) -> "Poly":
        """Multiply by the field element with the given code."""
        if not code:
            return self.ring.zero
        if code == 1:
            return self
        mul = self.ring.spec.mul
        return Poly._make(self.ring, {e: mul(c, code) for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(_code(self.ring.spec, other))
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return self.ring.zero
        spec = self.ring.spec
        add, mul = spec.add, spec.mul
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = mul(c1, c2)
                prev = out.get(e)
                if prev is None:
                    out[e] = c
                else:
                    s = add(prev, c)
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        if out and _out_of_range(out):
            raise ExponentOverflow("product exponent exceeds 2^31")
        return Poly._make(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative powers only for monomials")
            (e, c), = self.terms.items()
            n = -n
            spec = self.ring.spec
            exps = tuple(-x * n for x in e)
            _check_exps(self.ring, exps)
            return Poly._make(self.ring, {exps: spec.pow(spec.inv(c), n)})
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- queries -------------------------------------------------------------

    def degree(self, var: str):
        i = self.ring.index(var)
        if not self.terms:
            return NEG_INFINITY
        return max(e[i] for e in self.terms)

    def valuation(self, var: str):
        i = self.ring.index(var)
        if not self.terms:
            return POS_INFINITY
        return min(e[i] for e in self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        return sorted(self.terms.items())

    # -- substitution and coefficient maps ----------------------------------

    def substitute(self, var: str, value) -> "Poly":
        """Set ``var`` to a field element; the result lives in the ring without ``var``."""
        ring = self.ring
        i = ring.index(var)
        spec = ring.spec
        code = _code(spec, value)
        if code == 0 and ring.laurent[i]:
            raise ZeroAtLaurentVariable(f"cannot set Laurent variable {var} to 0")
        new_ring = ring.drop(var)
        add, mul, pw = spec.add, spec.mul, spec.pow
        out: dict[tuple[int, ...], int] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k and not code:
                continue
            c = mul(c, pw(code, k)) if k else c
            ne = e[:i] + e[i + 1:]
            prev = out.get(ne)
            if prev is None:
                out[ne] = c
            else:
                s = add(prev, c)
                if s:
                    out[ne] = s
                else:
                    del out[ne]
        return Poly._make(new_ring, out)

    def evaluate(self, point: Mapping[str, object]) -> "Poly":
        f = self
        for var, value in point.items():
            f = f.substitute(var, value)
        return f

    def map_coeffs(self, ring: PolyRing, fn: Callable[[int], int]) -> "Poly":
        """Apply ``fn`` to every coefficient code; ``ring`` must have the same variables."""
        out = {}
        for e, c in self.terms.items():
            nc = fn(c)
            if nc:
                out[e] = nc
        return Poly._make(ring, out)

    def map_exps(self, ring: PolyRing, fn: Callable[[tuple[int, ...]], tuple[int, ...]]) -> "Poly":
        """Rewrite exponent vectors into another ring; ``fn`` must be injective."""
        out = {}
        for e, c in self.terms.items():
            ne = tuple(fn(e))
            _check_exps(ring, ne)
            out[ne] = c
        return Poly._make(ring, out)

    def embed(self, ring: PolyRing) -> "Poly":
        """View this polynomial in a ring over the same field with a superset of variables."""
        if ring.spec != self.ring.spec:
            raise RingMismatch("embedding needs the same field")
        idx = [ring.index(v) for v in self.ring.vars]
        n = ring.nvars

        def move(e):
            out = [0] * n
            for j, x in zip(idx, e):
                out[j] = x
            return tuple(out)

        return self.map_exps(ring, move)

    # -- text and JSON -------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "0"
        spec = self.ring.spec
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = []
            for v, x in zip(self.ring.vars, e):
                if x == 1:
                    mono.append(v)
                elif x:
                    mono.append(f"{v}^{x}")
            cs = spec.format(c)
            if "+" in cs:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append("*".join(mono))
            else:
                parts.append(cs + "*" + "*".join(mono))
        return " + ".join(parts)

    def to_json(self) -> list:
        spec = self.ring.spec
        out = []
        for e, c in self.sorted_terms():
            out.append({
                "exps": {v: x for v, x in zip(self.ring.vars, e) if x},
                "coeff": list(spec.digits_of(c)),
            })
        return out

    @classmethod
    def from_json(cls, ring: PolyRing, doc) -> "Poly":
        if not isinstance(doc, list):
            raise FormatError("polynomial must be a list of terms")
        spec = ring.spec
        terms = {}
        for term in doc:
            try:
                exps = term["exps"]
                digits = term["coeff"]
            except (KeyError, TypeError) as exc:
                raise FormatError(f"bad polynomial term {term!r}") from exc
            if not isinstance(exps, dict) or not isinstance(digits, list):
                raise FormatError(f"bad polynomial term {term!r}")
            vec = [0] * ring.nvars
            for v, x in exps.items():
                if v not in ring:
                    raise FormatError(f"unknown variable {v!r} in term")
                if not isinstance(x, int):
                    raise FormatError("exponents must be integers")
                vec[ring.index(v)] = x
            if len(digits) != spec.m or any(not isinstance(d, int) or not 0 <= d < spec.p for d in digits):
                raise FormatError(f"bad coefficient digits {digits!r}")
            key = tuple(vec)
            if key in terms:
                raise FormatError("repeated monomial in polynomial")
            try:
                _check_exps(ring, key)
            except ValueError as exc:
                raise FormatError(str(exc)) from exc
            code = spec._code_of(digits)
            if not code:
                raise FormatError("zero coefficient in polynomial")
            terms[key] = code
        return cls._make(ring, terms)


def poly_arith(f: Poly, g: Poly, op: str) -> Poly:
    if not isinstance(g, Poly) or f.ring != g.ring:
        raise RingMismatch("operands live in different rings")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def substitute(f: Poly, var: str, value) -> Poly:
    return f.substitute(var, value)


def degree_val(f: Poly, var: str, which: str):
    if which == "degree":
        return f.degree(var)
    if which == "valuation":
        return f.valuation(var)
    raise ValueError(f"unknown query {which!r}")


def poly_sum(polys: Iterable[Poly], ring: PolyRing) -> Poly:
    acc = ring.zero
    for f in polys:
        acc = acc + f
    return acc
