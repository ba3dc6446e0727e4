"""Integer unimodular matrices, the continued-fraction monoid and the PGL(2,Z) cocycle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Sequence, Tuple

from .rational import INFINITY, Rational, reduce

INF = math.inf


@dataclass(frozen=True)
class Mat2Z:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det not in (1, -1):
            raise ValueError(f"determinant {self.det} is not +-1")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: "Mat2Z") -> "Mat2Z":
        return Mat2Z(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                     self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "Mat2Z":
        e = self.det
        return Mat2Z(e * self.d, -e * self.b, -e * self.c, e * self.a)

    def tuple(self):
        return (self.a, self.b, self.c, self.d)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = Mat2Z(1, 0, 0, 1)
T_MAT = Mat2Z(1, 1, 0, 1)
T_INV_MAT = Mat2Z(1, -1, 0, 1)
S_MAT = Mat2Z(0, 1, 1, 0)
U_MAT = Mat2Z(-1, 0, 0, 1)


def gen(m: int) -> Mat2Z:
    """The generator g(m) = [[0,1],[1,m]], acting as z -> 1/(z + m)."""
    if m < 1:
        raise ValueError("generator index must be >= 1")
    return Mat2Z(0, 1, 1, m)


@dataclass(frozen=True)
class MonoidWord:
    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(m) for m in self.letters))
        if any(m < 1 for m in self.letters):
            raise ValueError("letters must be >= 1")

    def matrix(self) -> Mat2Z:
        g = IDENTITY
        for m in self.letters:
            g = g @ gen(m)
        return g

    def __len__(self):
        return len(self.letters)


def act(g: Mat2Z, z):
    """Homographic action (az+b)/(cz+d) on the extended plane; math.inf is infinity."""
    a, b, c, d = g.tuple()
    if isinstance(z, float) and math.isinf(z):
        return INF if c == 0 else a / c
    den = c * z + d
    if den == 0:
        return INF
    return (a * z + b) / den


def act_rational(g: Mat2Z, r: Rational) -> Rational:
    return reduce(g.a * r.num + g.b * r.den, g.c * r.num + g.d * r.den) if not (
        g.c * r.num + g.d * r.den == 0) else INFINITY


def monoid_member(g: Mat2Z) -> bool:
    """Membership in the monoid generated by the g(m): d >= b >= a >= 0, d >= c >= a."""
    if g == IDENTITY:
        return True
    a, b, c, d = g.tuple()
    return d >= b >= a >= 0 and d >= c >= a


def factorize(g: Mat2Z) -> MonoidWord:
    """The unique word (m_1, ..., m_r) with g = g(m_1) ... g(m_r)."""
    if not monoid_member(g):
        raise ValueError(f"{g} is not in the monoid")
    letters: List[int] = []
    while g != IDENTITY:
        # g = g(m) g' forces b = d', d = b' + m b with 0 <= b' <= b
        m0 = g.d // g.b
        for m in (m0, m0 - 1):
            if m < 1:
                continue
            rest = gen(m).inverse() @ g
            if monoid_member(rest):
                letters.append(m)
                g = rest
                break
        else:
            raise ValueError("factorization failed")  # cannot happen for members
    return MonoidWord(tuple(letters))


def monoid_to_rational(w) -> Rational:
    """g.1 = (a+b)/(c+d): a bijection from the monoid onto rationals in (0,1]."""
    g = w.matrix() if isinstance(w, MonoidWord) else MonoidWord(tuple(w)).matrix()
    return reduce(g.a + g.b, g.c + g.d)


def rational_to_word(r: Rational) -> MonoidWord:
    """Inverse of monoid_to_rational on (0,1]."""
    if r.den == 0 or not 0 < r.num <= r.den:
        raise ValueError("need a rational in (0, 1]")
    letters = []
    # g.1 for g = g(m) g': 1/(m + g'.1); peel by the Gauss map with last step a >= 2
    x = Fraction(r.num, r.den)
    while x != 1:
        y = 1 / x
        m = math.floor(y)
        rest = y - m
        if rest == 0:
            m -= 1
            rest = Fraction(1)
        letters.append(m)
        x = rest
    return MonoidWord(tuple(letters))


def farey_interval_of(w) -> Tuple[Rational, Rational]:
    """(g.inf, g.0) = (a/c, b/d), a Farey pair."""
    g = w.matrix() if isinstance(w, MonoidWord) else MonoidWord(tuple(w)).matrix()
    left = INFINITY if g.c == 0 else reduce(g.a, g.c)
    right = reduce(g.b, g.d)
    return left, right


def enumerate_monoid(max_len: int, max_den: int) -> Iterator[Tuple[MonoidWord, Mat2Z]]:
    """Words of length <= max_len with d <= max_den, depth-first in lexicographic order."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")

    def walk(letters, g):
        yield MonoidWord(tuple(letters)), g
        if len(letters) >= max_len:
            return
        # g g(m) has bottom-right entry c + m d
        m = 1
        while g.c + m * g.d <= max_den:
            letters.append(m)
            yield from walk(letters, g @ gen(m))
            letters.pop()
            m += 1

    if IDENTITY.d <= max_den:
        yield from walk([], IDENTITY)


def _geq_golden_times(d: int, c: int) -> bool:
    # d >= G c with G = (1 + sqrt5)/2, for c >= 0, in integers
    t = 2 * d - c
    return t >= 0 and t * t >= 5 * c * c


def even_monoid_member(g: Mat2Z, include_unit: bool = False) -> bool:
    """Even-monoid test: d >= 2b > 0, c >= 2a >= 0 and d >= G c."""
    if g == IDENTITY:
        return include_unit
    a, b, c, d = g.tuple()
    return d >= 2 * b > 0 and c >= 2 * a >= 0 and _geq_golden_times(d, c)


# --- PGL(2,Z) words in S, T, T^-1 ---------------------------------------

S, T, TI = "S", "T", "T^-1"
_U6 = [S, TI, S, T, S, TI]  # U(x) = -x on (0,1), in application order


def _apply_letter(letter: str, x: Fraction) -> Fraction:
    if letter == T:
        return x + 1
    if letter == TI:
        return x - 1
    if letter == S:
        return 1 / x
    if letter == "U":
        return -x
    raise ValueError(letter)


def _raw_letters(g: Mat2Z) -> List[str]:
    # letters in application order (first applied first) for g up to sign
    out: List[str] = []
    a, b, c, d = g.tuple()
    while c != 0:
        k = a // c
        # g = T^k S g'' with g'' = [[c, d], [a - k c, b - k d]]
        out = [S] + ([T] * k if k > 0 else [TI] * (-k)) + out
        a, b, c, d = c, d, a - k * c, b - k * d
    # now g = [[a, b], [0, d]] with a, d = +-1: x -> (a x + b)/d
    if a * d > 0:
        shift = b * d  # x + b/d
        tail = [T] * shift if shift > 0 else [TI] * (-shift)
    else:
        shift = b * d  # -x + b/d
        tail = ["U"] + ([T] * shift if shift > 0 else [TI] * (-shift))
    return tail + out


def _free_reduce(letters: Sequence[str]) -> List[str]:
    inv = {T: TI, TI: T, S: S}
    stack: List[str] = []
    for l in letters:
        if stack and inv[stack[-1]] == l:
            stack.pop()
        else:
            stack.append(l)
    return stack


def _check_irrational(x0: float) -> None:
    from .cf_real import expand_cf
    # a float is always rational; reject only small-denominator coincidences
    x = float(x0)
    cf = expand_cf(x, 50, tol=0.0)
    for p, q in zip(cf.p, cf.q):
        if q > 10**4:
            break
        if abs(x - p / q) <= 1e-12 * max(1.0, abs(x)):
            raise ValueError(f"x0 = {x0} is numerically rational ({p}/{q})")


def decompose_word(g: Mat2Z, x0: float) -> List[str]:
    """Minimal word g_1, ..., g_r (application order) over {S, T, T^-1} with S used only at positive points."""
    _check_irrational(x0)
    x = Fraction(x0)
    pending = _raw_letters(g)
    out: List[str] = []
    while pending:
        l = pending.pop(0)
        if l == S and x < 0:
            pending = ["U", S, "U"] + pending
            continue
        if l == "U":
            n = math.floor(x)
            if n == 0:
                pending = list(_U6) + pending
            else:
                shift = [TI] * n if n > 0 else [T] * (-n)
                pending = shift + list(_U6) + shift + pending
            continue
        out.append(l)
        x = _apply_letter(l, x)
    return _free_reduce(out)


def word_points(word: Sequence[str], x0: float) -> List[float]:
    xs = [Fraction(x0)]
    for l in word:
        xs.append(_apply_letter(l, xs[-1]))
    return [float(v) for v in xs]


def _chi_letter(letter: str, x: float, nu: float, eps: int) -> float:
    if letter == S:
        return eps * abs(x) ** nu
    return 1.0


def automorphic_factor(g: Mat2Z, x0: float, nu: float = 1.0, eps: int = 1) -> float:
    """Product of chi(g_i, x_{i-1}) over the minimal word; chi(S, x) = eps |x|^nu, chi(T) = 1."""
    word = decompose_word(g, x0)
    xs = word_points(word, x0)
    out = 1.0
    for l, x in zip(word, xs):
        out *= _chi_letter(l, x, nu, eps)
    return out


def automorphic_factor_closed(g: Mat2Z, x0: float, nu: float = 1.0, eps: int = 1) -> float:
    v = abs(g.c * x0 + g.d) ** nu
    return v if eps == 1 else g.det * v


def cocycle_eval(f: Callable[[float], float], g: Mat2Z, x0: float, nu: float = 1.0, eps: int = 1) -> float:
    """Cocycle with c(T, x) = 0 and c(S, x) = f(x) on (0,1), summed along the minimal word."""
    word = decompose_word(g, x0)
    xs = word_points(word, x0)
    total, chi = 0.0, 1.0
    for l, x in zip(word, xs):
        if l == S:
            if x < 1.0:
                c = f(x)
            else:
                c = -eps * x**nu * f(1.0 / x)
            total += c * chi
        chi *= _chi_letter(l, x, nu, eps)
    return total


def parse_matrix(text: str) -> Mat2Z:
    vals = [int(v) for v in text.replace("[", " ").replace("]", " ").replace(",", " ").split()]
    if len(vals) != 4:
        raise ValueError("matrix needs four integers a,b,c,d")
    return Mat2Z(*vals)
