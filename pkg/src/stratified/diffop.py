"""Divided-power partial derivatives, binomials mod p, and p-adic digit vectors."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd

from .errors import DenominatorDivisibleByP
from .poly import Poly


@lru_cache(maxsize=1 << 16)
def binom_mod_p(h: int, k: int, p: int) -> int:
    """C(h, k) mod p by Lucas's theorem; negative ``h`` via C(-m, k) = (-1)^k C(m+k-1, k)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if h < 0:
        sign = -1 if k % 2 else 1
        return (sign * binom_mod_p(k - h - 1, k, p)) % p
    result = 1
    while k:
        hd, kd = h % p, k % p
        if kd > hd:
            return 0
        result = result * comb(hd, kd) % p
        h //= p
        k //= p
    return result


def divided_partial(f: Poly, var: str, k: int) -> Poly:
    """Apply ∂_var^(k): x^h -> C(h, k) x^(h-k), other variables treated as constants."""
    if k < 0:
        raise ValueError("order must be >= 0")
    ring = f.ring
    i = ring.index(var)
    if k == 0 or not f.terms:
        return f
    spec = ring.spec
    p = spec.p
    out = {}
    for e, c in f.terms.items():
        b = binom_mod_p(e[i], k, p)
        if b:
            ne = e[:i] + (e[i] - k,) + e[i + 1:]
            out[ne] = c if b == 1 else spec.mul(c, b)
    return Poly._make(ring, out)


def partial_matrix(mat, var: str, k: int):
    """Entrywise ∂_var^(k) of a matrix of polynomials."""
    return tuple(tuple(divided_partial(f, var, k) for f in row) for row in mat)


@dataclass(frozen=True)
class DigitVector:
    """Truncated p-adic integer: ``digits[h]`` multiplies ``p**h``."""

    p: int
    digits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError(f"digits must lie in [0, {self.p})")

    def __len__(self):
        return len(self.digits)

    def __getitem__(self, h):
        return self.digits[h]

    def value_mod(self) -> int:
        """The truncation as an integer in [0, p^len)."""
        return sum(d * self.p ** h for h, d in enumerate(self.digits))

    def __str__(self):
        return ",".join(map(str, self.digits))


def p_adic_digits(a: int, b: int, p: int, H: int) -> DigitVector:
    """First H+1 base-p digits of the p-adic expansion of a/b."""
    if b == 0 or gcd(b, p) != 1:
        raise DenominatorDivisibleByP(f"denominator {b} is not a unit mod {p}")
    binv = pow(b, -1, p)
    digits = []
    for _ in range(H + 1):
        d = (a * binv) % p
        digits.append(d)
        a = (a - d * b) // p
    return DigitVector(p, tuple(digits))


def binom_digits_mod_p(digits: DigitVector, k: int) -> int:
    """C(alpha, k) mod p where alpha has the given digits (Lucas, k < p^len)."""
    p = digits.p
    result = 1
    h = 0
    while k:
        kd = k % p
        ad = digits.digits[h] if h < len(digits.digits) else None
        if ad is None:
            raise ValueError("k exceeds the digit truncation")
        if kd > ad:
            return 0
        result = result * comb(ad, kd) % p
        k //= p
        h += 1
    return result
