"""Finite fields F_{p^m} with a pinned modulus, and dense linear algebra over them.

Elements are stored internally as integer codes ``sum(d_i * p**i)`` where
``d_i`` are the digits (coefficients of ``T**i``).  The prime field F_p is the
set of codes ``0 .. p-1``, so small integers embed directly.  Hot loops in the
polynomial and matrix code work on codes through :class:`FieldSpec` methods;
:class:`FieldElement` is the public scalar type.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Sequence

from .errors import (
    DegreeMismatch,
    DivisionByZero,
    FormatError,
    NoSolution,
    NotPrime,
    ReducibleModulus,
    ShapeMismatch,
    Singular,
    SpecMismatch,
)

_MUL_TABLE_LIMIT = 1 << 16
_ADD_TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _poly_rem(num: list[int], den: Sequence[int], p: int) -> list[int]:
    """Remainder of digit-list polynomials over F_p; ``den`` must be monic."""
    num = list(num)
    dd = len(den) - 1
    for top in range(len(num) - 1, dd - 1, -1):
        c = num[top] % p
        if c:
            shift = top - dd
            for i, d in enumerate(den):
                num[shift + i] = (num[shift + i] - c * d) % p
    rem = [c % p for c in num[:dd]]
    return rem


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= m/2."""
    m = len(modulus) - 1
    for deg in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            divisor = list(low) + [1]
            if not any(_poly_rem(list(modulus), divisor, p)):
                return False
    return True


class FieldSpec:
    """The field F_p[T]/(modulus) with ``p**m`` elements."""

    __slots__ = (
        "p", "m", "modulus", "q", "_digits", "_exp", "_log", "_add", "_neg",
    )

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        p = int(p)
        m = int(m)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if m < 1:
            raise DegreeMismatch(f"extension degree must be >= 1, got {m}")
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != m + 1:
            raise DegreeMismatch(
                f"modulus has {len(modulus)} digits, expected {m + 1}")
        if any(not 0 <= c < p for c in modulus):
            raise DegreeMismatch("modulus digits must lie in [0, p)")
        if modulus[-1] != 1:
            raise DegreeMismatch("modulus must be monic")
        if m == 1 and modulus != (0, 1):
            raise DegreeMismatch("prime field modulus must be T, i.e. [0, 1]")
        if m > 1 and not is_irreducible(modulus, p):
            raise ReducibleModulus(f"modulus {list(modulus)} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.modulus = modulus
        self.q = p ** m
        self._digits = None
        self._exp = None
        self._log = None
        self._add = None
        self._neg = None
        self._build_tables()

    # -- construction helpers ------------------------------------------------

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.q
        if q <= _MUL_TABLE_LIMIT:
            self._digits = [self._digits_slow(c) for c in range(q)]
            self._neg = [self._code_of([(-d) % p for d in self._digits[c]])
                         for c in range(q)]
            if q <= _ADD_TABLE_LIMIT and p != 2:
                self._add = [[self._add_slow(a, b) for b in range(q)]
                             for a in range(q)]
            if q == 2:
                self._exp = [1]
                self._log = [None, 0]
                return
            for g in range(2 if m == 1 else p, q):
                exp = [1]
                x = g
                while x != 1:
                    exp.append(x)
                    x = self._mul_slow(x, g)
                if len(exp) == q - 1:
                    log = [None] * q
                    for i, v in enumerate(exp):
                        log[v] = i
                    self._exp = exp
                    self._log = log
                    return
            raise AssertionError("no primitive element found")  # pragma: no cover

    def _digits_slow(self, code: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.m):
            code, d = divmod(code, p)
            out.append(d)
        return tuple(out)

    def _code_of(self, digits: Sequence[int]) -> int:
        code = 0
        for d in reversed(digits):
            code = code * self.p + d
        return code

    def _add_slow(self, a: int, b: int) -> int:
        p = self.p
        da, db = self.digits_of(a), self.digits_of(b)
        return self._code_of([(x + y) % p for x, y in zip(da, db)])

    def _mul_slow(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        da, db = self.digits_of(a), self.digits_of(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        if m == 1:
            return prod[0] % p
        return self._code_of(_poly_rem(prod, self.modulus, p))

    # -- code-level arithmetic ----------------------------------------------

    def digits_of(self, code: int) -> tuple[int, ...]:
        if self._digits is not None:
            return self._digits[code]
        return self._digits_slow(code)

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._add is not None:
            return self._add[a][b]
        return self._add_slow(a, b)

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        if self._neg is not None:
            return self._neg[a]
        return self._code_of([(-d) % self.p for d in self.digits_of(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return (a * b) % self.p
        if self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.m == 1:
            return pow(a, -1, self.p)
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a = self.inv(a)
            e = -e
        if a == 0:
            return 1 if e == 0 else 0
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.q - 1)]
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def scale_int(self, n: int, a: int) -> int:
        """``n * a`` for an ordinary integer ``n``."""
        return self.mul(n % self.p, a)

    # -- element-level API ---------------------------------------------------

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise SpecMismatch("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FieldElement._from_code(self, value % self.p)
        return FieldElement(self, value)

    def element(self, code: int) -> "FieldElement":
        return FieldElement._from_code(self, code)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement._from_code(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement._from_code(self, 1)

    @property
    def gen(self) -> "FieldElement":
        """The class of T (equal to 0 in a prime field)."""
        return FieldElement._from_code(self, self.p if self.m > 1 else 0)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement._from_code(self, c) for c in range(self.q)]

    def codes_sorted_lex(self) -> list[int]:
        """All codes ordered lexicographically by digit list (d0, d1, ...)."""
        return sorted(range(self.q), key=self.digits_of)

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, doc) -> "FieldSpec":
        try:
            return cls(doc["p"], doc["m"], doc["modulus"])
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad field document: {exc}") from exc

    def _key(self):
        return (self.p, self.m, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"

    # -- text syntax "d0+d1*T+d2*T^2" ---------------------------------------

    def format(self, code: int) -> str:
        parts = []
        for i, d in enumerate(self.digits_of(code)):
            if not d:
                continue
            if i == 0:
                parts.append(str(d))
            elif i == 1:
                parts.append(f"{d}*T")
            else:
                parts.append(f"{d}*T^{i}")
        return "+".join(parts) if parts else "0"

    _TERM = re.compile(r"^(?:(\d+)\*?)?(T(?:\^(\d+))?)?$")

    def parse(self, text: str) -> "FieldElement":
        text = text.replace(" ", "")
        if not text:
            raise FormatError("empty field element")
        digits = [0] * self.m
        for raw in text.split("+"):
            match = self._TERM.match(raw)
            if not raw or not match or (match.group(1) is None and match.group(2) is None):
                raise FormatError(f"cannot parse field element term {raw!r}")
            coeff = int(match.group(1)) if match.group(1) is not None else 1
            if match.group(2) is None:
                power = 0
            else:
                power = int(match.group(3)) if match.group(3) is not None else 1
            if power >= self.m:
                raise FormatError(f"power T^{power} not below extension degree {self.m}")
            digits[power] = (digits[power] + coeff) % self.p
        return FieldElement(self, digits)


def make_field(p: int, m: int, modulus: Sequence[int]) -> FieldSpec:
    return FieldSpec(p, m, modulus)


def prime_field(p: int) -> FieldSpec:
    return FieldSpec(p, 1, (0, 1))


class FieldElement:
    """Immutable element of a :class:`FieldSpec`."""

    __slots__ = ("spec", "code")

    def __init__(self, spec: FieldSpec, digits: Sequence[int]):
        digits = list(digits)
        if len(digits) != spec.m:
            raise DegreeMismatch(f"expected {spec.m} digits, got {len(digits)}")
        self.spec = spec
        self.code = spec._code_of([int(d) % spec.p for d in digits])

    @classmethod
    def _from_code(cls, spec: FieldSpec, code: int) -> "FieldElement":
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.code = code
        return obj

    @property
    def digits(self) -> list[int]:
        return list(self.spec.digits_of(self.code))

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise SpecMismatch("operands live in different fields")
            return other.code
        if isinstance(other, int):
            return other % self.spec.p
        return NotImplemented

    def _wrap(self, code: int) -> "FieldElement":
        return FieldElement._from_code(self.spec, code)

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._wrap(self.spec.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._wrap(self.spec.sub(self.code, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._wrap(self.spec.sub(b, self.code))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._wrap(self.spec.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._wrap(self.spec.div(self.code, b))

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._wrap(self.spec.div(b, self.code))

    def __neg__(self):
        return self._wrap(self.spec.neg(self.code))

    def __pow__(self, e: int):
        return self._wrap(self.spec.pow(self.code, e))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.spec.inv(self.code))

    def is_zero(self) -> bool:
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.code == other.code
        if isinstance(other, int):
            return self.code == other % self.spec.p
        return NotImplemented

    def __hash__(self):
        return hash((self.spec.p, self.spec.modulus, self.code))

    def __repr__(self):
        return self.spec.format(self.code)

    __str__ = __repr__


def arith(a: FieldElement, b, op: str) -> FieldElement:
    """Dispatch ``add|sub|mul|div|pow`` on two elements (``pow`` takes an int)."""
    if op == "pow":
        return a ** int(b)
    if isinstance(b, FieldElement) and a.spec != b.spec:
        raise SpecMismatch("operands live in different fields")
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    try:
        return ops[op]()
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None


# ---------------------------------------------------------------------------
# Dense linear algebra on code matrices (lists of lists of int codes).
# ---------------------------------------------------------------------------


def _check_shape(rows: Sequence[Sequence[int]], ncols: int | None = None) -> int:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    for row in rows:
        if len(row) != ncols:
            raise ShapeMismatch("ragged matrix")
    return ncols


def rref(spec: FieldSpec, rows: Sequence[Sequence[int]], ncols: int | None = None):
    """Reduced row echelon form.  Returns ``(matrix, pivot_columns)``."""
    ncols = _check_shape(rows, ncols)
    mat = [list(r) for r in rows]
    add, mul, inv, neg = spec.add, spec.mul, spec.inv, spec.neg
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pr = mat[r]
        s = inv(pr[c])
        if s != 1:
            for j in range(c, ncols):
                if pr[j]:
                    pr[j] = mul(pr[j], s)
        nz = [j for j in range(c, ncols) if pr[j]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = neg(mat[i][c])
                row = mat[i]
                for j in nz:
                    row[j] = add(row[j], mul(f, pr[j]))
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(spec: FieldSpec, rows: Sequence[Sequence[int]]) -> int:
    return len(rref(spec, rows)[1])


def kernel(spec: FieldSpec, rows: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """Right kernel basis ``{v : rows @ v = 0}``, itself in reduced echelon form."""
    ncols = _check_shape(rows, ncols)
    red, pivots = rref(spec, rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, pivots):
            if row[f]:
                v[pc] = spec.neg(row[f])
        basis.append(v)
    if not basis:
        return []
    return rref(spec, basis, ncols)[0]


def solve(spec: FieldSpec, rows: Sequence[Sequence[int]], rhs: Sequence[int], ncols: int | None = None):
    """One solution of ``rows @ v = rhs`` plus a kernel basis; raises NoSolution."""
    ncols = _check_shape(rows, ncols)
    if len(rhs) != len(rows):
        raise ShapeMismatch("rhs length does not match row count")
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(spec, aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        raise NoSolution("inconsistent linear system")
    v = [0] * ncols
    for row, pc in zip(red, pivots):
        v[pc] = row[ncols]
    return v, kernel(spec, rows, ncols)


def inverse(spec: FieldSpec, rows: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(rows)
    _check_shape(rows, n)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(spec, aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise Singular("matrix is singular")
    return [row[n:] for row in red]


def matmul(spec: FieldSpec, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    if a and len(a[0]) != len(b):
        raise ShapeMismatch("inner dimensions differ")
    ncols = len(b[0]) if b else 0
    add, mul = spec.add, spec.mul
    out = []
    for row in a:
        acc = [0] * ncols
        for k, x in enumerate(row):
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        acc[j] = add(acc[j], mul(x, y))
        out.append(acc)
    return out


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(col) for col in zip(*a)]


def left_kernel(spec: FieldSpec, rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of ``{c : c @ rows = 0}`` in reduced echelon form."""
    if not rows:
        return []
    return kernel(spec, transpose(rows), len(rows))


def joint_eigenspaces(spec: FieldSpec, mats: Sequence[Sequence[Sequence[int]]], values: Iterable[int]):
    """Split F^r into joint left eigenspaces of a commuting family.

    Each matrix acts on row vectors from the right (``c -> c @ B``).  Only the
    candidate eigenvalue codes in ``values`` are tried.  Returns a list of
    ``(eigenvalue_tuple, basis_rows)``, or ``None`` when some matrix is not
    diagonalizable with eigenvalues drawn from ``values``.
    """
    values = list(values)
    if not mats:
        return []
    r = len(mats[0])
    pieces = [((), identity(r))]
    for mat in mats:
        nxt = []
        for label, basis in pieces:
            wb = matmul(spec, basis, mat)
            found = 0
            for lam in values:
                shifted = [[spec.sub(x, spec.mul(lam, y)) for x, y in zip(rw, rb)]
                           for rw, rb in zip(wb, basis)]
                coeffs = left_kernel(spec, shifted)
                if coeffs:
                    found += len(coeffs)
                    nxt.append((label + (lam,), matmul(spec, coeffs, basis)))
            if found != len(basis):
                return None
        pieces = nxt
    return pieces


# ---------------------------------------------------------------------------
# FieldElement-level front end
# ---------------------------------------------------------------------------


def _codes(matrix: Sequence[Sequence[FieldElement]]) -> tuple[FieldSpec, list[list[int]]]:
    spec = None
    out = []
    for row in matrix:
        crow = []
        for x in row:
            if spec is None:
                spec = x.spec
            elif x.spec != spec:
                raise SpecMismatch("matrix mixes fields")
            crow.append(x.code)
        out.append(crow)
    if spec is None:
        raise ShapeMismatch("empty matrix")
    return spec, out


def linalg(matrix: Sequence[Sequence[FieldElement]], task: str, rhs: Sequence[FieldElement] | None = None):
    """Run ``solve|kernel|inverse|rank`` on a matrix of field elements.

    ``solve`` returns ``(solution, kernel_basis)``; ``kernel`` returns a basis
    in reduced echelon form; ``inverse`` returns the inverse matrix; ``rank``
    an int.
    """
    spec, rows = _codes(matrix)
    wrap = lambda vec: [spec.element(c) for c in vec]
    if task == "rank":
        return rank(spec, rows)
    if task == "kernel":
        return [wrap(v) for v in kernel(spec, rows)]
    if task == "inverse":
        return [wrap(v) for v in inverse(spec, rows)]
    if task == "solve":
        if rhs is None:
            raise ShapeMismatch("solve needs a right-hand side")
        b = [spec(x).code for x in rhs]
        v, ker = solve(spec, rows, b)
        return wrap(v), [wrap(k) for k in ker]
    raise ValueError(f"unknown task {task!r}")
