"""Small dense matrices of polynomials, stored as tuples of tuples of Poly."""

from __future__ import annotations

from typing import Callable, Sequence

from .poly import Poly, PolyRing

Matrix = tuple  # tuple[tuple[Poly, ...], ...]


def as_matrix(rows: Sequence[Sequence[Poly]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def zero(ring: PolyRing, n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    z = ring.zero
    return tuple(tuple(z for _ in range(m)) for _ in range(n))


def identity(ring: PolyRing, n: int) -> Matrix:
    z, o = ring.zero, ring.one
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def is_zero(a: Matrix) -> bool:
    return all(not f.terms for row in a for f in row)


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in a)


def scale(a: Matrix, c) -> Matrix:
    """Multiply every entry by a polynomial or scalar."""
    return tuple(tuple(x * c for x in row) for row in a)


def mul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return ()
    n, m = len(b), len(b[0])
    ring = a[0][0].ring
    out = []
    for row in a:
        acc = [ring.zero] * m
        for k in range(n):
            x = row[k]
            if not x.terms:
                continue
            brow = b[k]
            for j in range(m):
                y = brow[j]
                if y.terms:
                    acc[j] = acc[j] + x * y
        out.append(tuple(acc))
    return tuple(out)


def vec_mul(v: Sequence[Poly], a: Matrix) -> tuple[Poly, ...]:
    """Row vector times matrix."""
    return mul((tuple(v),), a)[0]


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def kron(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(x * y for x in ra for y in rb)
        for ra in a for rb in b
    )


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    ring = (a or b)[0][0].ring
    z = ring.zero
    n, m = len(a), len(b)
    rows = [tuple(ra) + (z,) * m for ra in a]
    rows += [(z,) * n + tuple(rb) for rb in b]
    return tuple(rows)


def apply(a: Matrix, fn: Callable[[Poly], Poly]) -> Matrix:
    return tuple(tuple(fn(x) for x in row) for row in a)


def degree(a: Matrix, var: str):
    degs = [f.degree(var) for row in a for f in row if f.terms]
    return max(degs) if degs else float("-inf")


def det(a: Matrix) -> Poly:
    """Determinant by expansion over column subsets (O(2^n n) polynomial products)."""
    n = len(a)
    ring = a[0][0].ring
    layer = {0: ring.one}
    for i in range(n):
        row = a[i]
        nxt: dict[int, Poly] = {}
        for mask, val in layer.items():
            for c in range(n):
                if mask >> c & 1 or not row[c].terms:
                    continue
                above = bin(mask >> (c + 1)).count("1")
                term = val * row[c]
                if above % 2:
                    term = -term
                key = mask | (1 << c)
                nxt[key] = nxt[key] + term if key in nxt else term
        layer = nxt
    return layer.get((1 << n) - 1, ring.zero)


def minor(a: Matrix, i: int, j: int) -> Matrix:
    return tuple(
        tuple(x for c, x in enumerate(row) if c != j)
        for r, row in enumerate(a) if r != i
    )


def adjugate(a: Matrix) -> Matrix:
    n = len(a)
    ring = a[0][0].ring
    if n == 1:
        return ((ring.one,),)
    cof = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            d = det(minor(a, i, j))
            cof[j][i] = -d if (i + j) % 2 else d
    return as_matrix(cof)
