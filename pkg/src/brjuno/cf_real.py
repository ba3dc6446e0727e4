"""Real continued fractions, beta products and the real Brjuno sum."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .rational import Rational

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # g
GOLDEN_INV = 1.0 / GOLDEN  # G = 1 + g


@dataclass(frozen=True)
class CFDigits:
    """The real number [a0; prefix..., period, period, ...].

    An empty period means the expansion stops after the prefix (a rational).
    Residues are evaluated by backward recursion, so they stay accurate to
    rounding however deep the expansion goes.
    """
    a0: int
    prefix: Tuple[int, ...] = ()
    period: Tuple[int, ...] = ()

    def __post_init__(self):
        if any(int(a) < 1 for a in self.prefix + self.period):
            raise ValueError("partial quotients must be >= 1")
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        object.__setattr__(self, "period", tuple(int(a) for a in self.period))

    def quotient(self, n: int) -> Optional[int]:
        """a_n for n >= 1, None past the end of a finite expansion."""
        k = n - 1
        if k < len(self.prefix):
            return self.prefix[k]
        if not self.period:
            return None
        return self.period[(k - len(self.prefix)) % len(self.period)]

    def shift(self) -> "CFDigits":
        """Digits of 1/(x - a0), i.e. [a1; a2, ...]."""
        a1 = self.quotient(1)
        if a1 is None:
            raise ZeroDivisionError("x is an integer")
        if self.prefix:
            return CFDigits(a1, self.prefix[1:], self.period)
        per = self.period
        return CFDigits(a1, (), per[1:] + per[:1])

    def max_quotient(self) -> int:
        return max(self.prefix + self.period, default=1)

    def __float__(self) -> float:
        return self.a0 + _tail_value(self, 0, 80)


def _tail_value(d: CFDigits, n: int, extra: int) -> float:
    # x_n = [0; a_{n+1}, a_{n+2}, ...]
    vals = []
    for j in range(n + 1, n + 1 + extra):
        a = d.quotient(j)
        if a is None:
            break
        vals.append(a)
    y = 0.0
    for a in reversed(vals):
        y = 1.0 / (a + y)
    return y


def quadratic_digits(name: str) -> CFDigits:
    table = {
        "golden": CFDigits(0, (), (1,)),
        "sqrt2m1": CFDigits(0, (), (2,)),
        "silver": CFDigits(0, (), (2,)),
    }
    return table[name]


@dataclass
class RealCF:
    a0: int
    quotients: List[int] = field(default_factory=list)  # a_1, a_2, ...
    residues: List[float] = field(default_factory=list)  # x_0, x_1, ...
    p: List[int] = field(default_factory=list)  # p_0, p_1, ...
    q: List[int] = field(default_factory=list)
    beta: List[float] = field(default_factory=list)  # beta_0, beta_1, ...
    terminated: bool = False
    max_quotient_hint: Optional[int] = None

    def convergent(self, n: int) -> Rational:
        from .rational import reduce
        return reduce(self.p[n], self.q[n])


def gauss_map(x) -> Tuple[int, object]:
    """One step of the Gauss map: (floor(1/x), 1/x - floor(1/x))."""
    if isinstance(x, Rational):
        x = Fraction(x.num, x.den)
    if isinstance(x, Fraction):
        if not 0 < x < 1:
            raise ValueError("gauss_map needs 0 < x < 1")
        y = 1 / x
        a = math.floor(y)
        return a, y - a
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError("gauss_map needs 0 < x < 1")
    y = 1.0 / x
    a = math.floor(y)
    return a, y - a


def _convergents(a0: int, quotients: Sequence[int]):
    p_prev, q_prev = 1, 0
    p_cur, q_cur = a0, 1
    ps, qs = [p_cur], [q_cur]
    for a in quotients:
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        ps.append(p_cur)
        qs.append(q_cur)
    return ps, qs


def _expand_exact(x: Fraction, max_terms: int, tol: float, x_ref: Optional[Fraction] = None) -> RealCF:
    a0 = math.floor(x)
    r = x - a0
    quotients, residues_exact = [], [r]
    ps, qs = [a0], [1]
    p_prev, q_prev = 1, 0
    terminated = r == 0
    target = x if x_ref is None else x_ref
    scale = max(1.0, abs(float(target)))
    while not terminated and len(quotients) < max_terms:
        if tol > 0 and float(r) < tol:
            terminated = True
            break
        if tol > 0 and abs(float(target - Fraction(ps[-1], qs[-1]))) <= tol * scale and len(quotients) > 0:
            terminated = True
            break
        y = 1 / r
        a = math.floor(y)
        r = y - a
        quotients.append(a)
        residues_exact.append(r)
        p_new = a * ps[-1] + p_prev
        q_new = a * qs[-1] + q_prev
        p_prev, q_prev = ps[-1], qs[-1]
        ps.append(p_new)
        qs.append(q_new)
        if r == 0:
            terminated = True
    if terminated:
        # drop the residues that were cut by the tolerance rule
        residues_exact = residues_exact[: len(quotients) + 1]
        if residues_exact[-1] != 0:
            residues_exact[-1] = Fraction(0)
    beta, b = [], Fraction(1)
    for xr in residues_exact:
        b *= xr
        beta.append(float(b))
    return RealCF(a0, quotients, [float(v) for v in residues_exact], ps, qs, beta, terminated)


def _expand_digits(d: CFDigits, max_terms: int) -> RealCF:
    quotients = []
    n = 0
    while n < max_terms:
        a = d.quotient(n + 1)
        if a is None:
            break
        quotients.append(a)
        n += 1
    terminated = d.quotient(len(quotients) + 1) is None
    residues = [_tail_value(d, j, 90) for j in range(len(quotients) + 1)]
    if terminated:
        residues[-1] = 0.0
    beta, b = [], 1.0
    for xr in residues:
        b *= xr
        beta.append(b)
    ps, qs = _convergents(d.a0, quotients)
    return RealCF(d.a0, quotients, residues, ps, qs, beta, terminated, d.max_quotient())


def expand_cf(x, max_terms: int = 60, tol: float = 1e-15) -> RealCF:
    """Continued fraction expansion of x up to max_terms partial quotients.

    Rationals (Rational, Fraction, int) are expanded by Euclid exactly.
    Floats are expanded exactly as the binary64 value they denote, stopping
    when a residue falls below tol or a convergent matches x within
    tol * max(1, |x|). CFDigits inputs give residues by backward recursion.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    if isinstance(x, CFDigits):
        return _expand_digits(x, max_terms)
    if isinstance(x, Rational):
        if x.den == 0:
            raise ValueError("infinity has no expansion")
        return _expand_exact(Fraction(x.num, x.den), max_terms, 0.0)
    if isinstance(x, (int, Fraction)):
        return _expand_exact(Fraction(x), max_terms, 0.0)
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError("non-finite input")
    return _expand_exact(Fraction(xf), max_terms, tol)


def neg_log(xj: float, pj: int = 0, qj: int = 1) -> float:
    return -math.log(xj)


def _default_tail(cf: RealCF, r: int, amax: int) -> float:
    # beta_{r-1} * B(x_r) with B(y) <= log(1/y_0) + y_0 * G^2 log(amax + 1)
    if cf.terminated and r >= len(cf.residues) - 1:
        return 0.0
    beta_prev = cf.beta[r - 1] if r >= 1 else 1.0
    xr = cf.residues[r] if r < len(cf.residues) else GOLDEN
    if xr <= 0.0:
        return 0.0
    return beta_prev * (-math.log(xr) + xr * GOLDEN_INV**2 * math.log(amax + 1.0))


def brjuno_real(x, kernel: Optional[Callable] = None, max_terms: int = 60,
                tol: float = 1e-15, kernel_bound: Optional[float] = None) -> Tuple[float, float]:
    """Brjuno-type sum sum_j beta_{j-1}(x) kernel(x_j) truncated at max_terms terms.

    Returns (value, tail_bound). With the default kernel -log the tail bound
    is beta_{r-1} * (log(1/x_r) + x_r G^2 log(A+1)), where A bounds the later
    partial quotients (exact for CFDigits, the largest seen quotient otherwise).
    With a custom kernel, kernel_bound (a sup of |kernel|) gives
    beta_{r-1} * kernel_bound / (1 - g).
    """
    cf = expand_cf(x, max_terms, tol)
    kern = kernel or neg_log
    total = 0.0
    r = 0
    for j, xj in enumerate(cf.residues[:max_terms]):
        if xj <= 0.0:
            break
        weight = cf.beta[j - 1] if j >= 1 else 1.0
        total += weight * kern(xj, cf.p[j], cf.q[j])
        r = j + 1
    if cf.terminated and r >= len(cf.residues) - 1:
        return total, 0.0
    if kernel is None:
        amax = cf.max_quotient_hint or max(cf.quotients, default=1)
        return total, _default_tail(cf, r, amax)
    if kernel_bound is None:
        return total, math.inf
    beta_prev = cf.beta[r - 1] if r >= 1 else 1.0
    return total, beta_prev * kernel_bound / (1.0 - GOLDEN)


def brjuno_finite(r) -> float:
    """Truncated Brjuno function of a rational: the sum over its finite expansion."""
    if isinstance(r, Rational):
        if r.den == 0:
            raise ValueError("infinity")
        fr = Fraction(r.num, r.den)
    else:
        fr = Fraction(r)
    value, _ = brjuno_real(fr, max_terms=10**6)
    return value
