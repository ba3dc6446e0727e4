"""Exact reduced fractions, Stern-Brocot parents and window enumeration."""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import List

INT_LIMIT = 2**63 - 1


def _check(n: int) -> int:
    if abs(n) > INT_LIMIT:
        raise OverflowError(f"integer {n} exceeds 64-bit range")
    return n


@dataclass(frozen=True, order=False)
class Rational:
    num: int
    den: int

    def __post_init__(self):
        if self.den < 0:
            raise ValueError("denominator must be non-negative")
        if self.den == 0 and self.num != 1:
            raise ValueError("only 1/0 is allowed as infinity")
        if math.gcd(self.num, self.den) != 1:
            raise ValueError(f"{self.num}/{self.den} is not reduced")
        _check(self.num)
        _check(self.den)

    @property
    def is_infinite(self) -> bool:
        return self.den == 0

    def __float__(self) -> float:
        if self.den == 0:
            return math.inf
        return self.num / self.den

    def key(self):
        # sort key valid for the extended line, infinity last
        if self.den == 0:
            return (1, 0, 0)
        return (0, self.num, self.den)

    def __lt__(self, other: "Rational") -> bool:
        if self.den == 0:
            return False
        if other.den == 0:
            return True
        return self.num * other.den < other.num * self.den

    def __le__(self, other: "Rational") -> bool:
        return self == other or self < other

    def __gt__(self, other: "Rational") -> bool:
        return other < self

    def __ge__(self, other: "Rational") -> bool:
        return other <= self

    def __str__(self):
        return f"{self.num}/{self.den}"

    def __repr__(self):
        return f"Rational({self.num}, {self.den})"


INFINITY = Rational(1, 0)


@dataclass(frozen=True)
class FareyParents:
    left: Rational
    right: Rational


def reduce(n: int, d: int) -> Rational:
    """Return n/d in lowest terms with a non-negative denominator."""
    n, d = int(n), int(d)
    if n == 0 and d == 0:
        raise ZeroDivisionError("0/0 is undefined")
    if d == 0:
        if n > 0:
            return INFINITY
        raise ValueError("negative infinity is not representable")
    if d < 0:
        n, d = -n, -d
    g = math.gcd(n, d)
    return Rational(_check(n // g), _check(d // g))


def parse_rational(text: str) -> Rational:
    text = text.strip()
    if "/" in text:
        a, b = text.split("/", 1)
        return reduce(int(a), int(b))
    return reduce(int(text), 1)


def farey_parents(r: Rational) -> FareyParents:
    """Unimodular pair (p'/q', p''/q'') whose mediant is r.

    For an integer p/1 the left parent is (p-1)/1 and the right one is 1/0.
    """
    if r.den == 0:
        raise ValueError("infinity has no Farey parents")
    p, q = r.num, r.den
    if q == 1:
        return FareyParents(Rational(_check(p - 1), 1), INFINITY)
    q1 = pow(p, -1, q)
    p1 = (p * q1 - 1) // q
    p2, q2 = p - p1, q - q1
    return FareyParents(Rational(p1, q1), Rational(p2, q2))


def enumerate_rationals(lo: float, hi: float, qmax: int) -> List[Rational]:
    """All reduced p/q in [lo, hi] with q <= qmax, ascending, ties by denominator."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    if qmax < 1:
        raise ValueError("qmax must be positive")
    out = []
    for q in range(1, qmax + 1):
        pmin = math.ceil(lo * q - 1e-12 * q)
        pmax = math.floor(hi * q + 1e-12 * q)
        for p in range(pmin, pmax + 1):
            if lo <= p / q <= hi and math.gcd(p, q) == 1:
                out.append(Rational(p, q))
    # exact comparison keeps the order reproducible
    out.sort(key=lambda r: (Fraction(r.num, r.den), r.den))
    return out
