"""Complex continued fractions: domain tests, the map z -> 1/z - m and cell location."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import List, Set, Tuple

TOL = 1e-12
ZERO_TOL = 1e-14
SQ3 = math.sqrt(3.0)
R13 = 1.0 / SQ3
RE_MIN = SQ3 / 2.0 - 1.0  # left tip of the fundamental domain at height 1/2


class DomainLabel(enum.Enum):
    D0 = "D0"
    D1 = "D1"
    D = "D"
    H0 = "H0"
    H0BAR = "H0bar"
    DELTA = "Delta"
    DINF = "Dinf"


class Stop(enum.Enum):
    HIT_ZERO = "hit_zero"
    LEFT_D = "left_D"
    DEPTH_CAP = "depth_cap"
    ON_ARC = "on_arc"


def in_D0(z: complex, tol: float = TOL) -> bool:
    return abs(z + 1) <= 1 + tol and z.real >= RE_MIN - tol


def in_D1(z: complex, tol: float = TOL) -> bool:
    return abs(z) >= 1 - tol and abs(z - R13) <= R13 + tol


def in_D(z: complex, tol: float = TOL) -> bool:
    return (abs(z) <= 1 + tol and abs(z - 1j) >= 1 - tol and abs(z + 1j) >= 1 - tol
            and z.real > 0)


def in_D_interior(z: complex, tol: float = TOL) -> bool:
    return (abs(z) < 1 - tol and abs(z - 1j) > 1 + tol and abs(z + 1j) > 1 + tol
            and z.real > tol)


def in_H0(z: complex, tol: float = TOL) -> bool:
    return abs(z - 1j) <= 1 + tol and abs(z + 1) >= 1 - tol and z.imag <= 0.5 + tol


def in_Delta(z: complex, tol: float = TOL) -> bool:
    return abs(z) <= 1 + tol and abs(z + 1) >= 1 - tol and abs(z.imag) <= 0.5 + tol


def in_Dinf(z: complex) -> bool:
    return (abs(z.imag) > 0.5 or z.real < RE_MIN
            or (z.real > SQ3 / 2 and abs(z - R13) > R13))


def classify(z) -> Set[DomainLabel]:
    """Every domain label whose closed set contains z (boundaries can give several)."""
    z = complex(z)
    if cmath.isinf(z):
        return {DomainLabel.DINF}
    out = set()
    if in_D0(z):
        out.add(DomainLabel.D0)
    if in_D1(z):
        out.add(DomainLabel.D1)
    if in_D(z):
        out.add(DomainLabel.D)
    if in_H0(z):
        out.add(DomainLabel.H0)
    if in_H0(z.conjugate()):
        out.add(DomainLabel.H0BAR)
    if in_Delta(z):
        out.add(DomainLabel.DELTA)
    if in_Dinf(z) or not out:
        out.add(DomainLabel.DINF)
    return out


def strip_shift(w: complex) -> int:
    """The integer n with w - n in the fundamental domain Delta (|Im w| <= 1/2)."""
    y = min(abs(w.imag), 1.0)
    s = math.sqrt(1.0 - y * y)
    n = math.ceil(w.real - s)
    if abs(w - n) >= 1 - TOL:
        # on the arc |w - n| = 1 the strict inequality |A| < 1 picks the next translate
        n += 1
    return n


def ccf_step(z: complex) -> Tuple[int, complex]:
    """A(z) = 1/z - m with m >= 1 chosen so that A(z) lies in Delta and |A(z)| < 1."""
    z = complex(z)
    if z == 0 or not in_D(z):
        raise ValueError(f"{z} is not in D")
    u = 1.0 / z
    m = strip_shift(u)
    if m < 1:
        raise ValueError(f"no admissible step from {z}")
    return m, u - m


@dataclass
class ComplexCF:
    z: List[complex] = field(default_factory=list)  # z_0, ..., z_l
    m: List[int] = field(default_factory=list)  # m_1, ..., m_l
    p: List[int] = field(default_factory=list)  # p_{-1}, p_0, ..., p_l
    q: List[int] = field(default_factory=list)
    beta: List[complex] = field(default_factory=list)  # beta_0, ..., beta_l
    stop: Stop = Stop.DEPTH_CAP

    def P(self, i: int) -> int:
        return self.p[i + 1]

    def Q(self, i: int) -> int:
        return self.q[i + 1]

    @property
    def depth(self) -> int:
        return len(self.m)


def ccf_expand(z0, max_depth: int = 60) -> ComplexCF:
    """Iterate z_{i+1} = 1/z_i - m_{i+1} while z_i stays in D."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    z0 = complex(z0)
    out = ComplexCF(z=[z0], m=[], p=[1, 0], q=[0, 1], beta=[z0])
    z = z0
    while True:
        if abs(z) < ZERO_TOL:
            out.stop = Stop.HIT_ZERO
            break
        if not in_D(z):
            out.stop = Stop.LEFT_D
            break
        if len(out.m) >= max_depth:
            out.stop = Stop.DEPTH_CAP
            break
        m, z = ccf_step(z)
        if abs(z) < ZERO_TOL:
            z = 0j
        out.m.append(m)
        out.z.append(z)
        out.p.append(m * out.p[-1] + out.p[-2])
        out.q.append(m * out.q[-1] + out.q[-2])
        out.beta.append(out.beta[-1] * z)
    return out


def locate_H_cell(z, max_k: int = 200) -> Tuple[int, List[int]]:
    """Translate n and word (m_1..m_k) with z - n in the cell H(m_1, ..., m_k)."""
    z = complex(z)
    if not 0 < z.imag <= 0.5:
        raise ValueError("need 0 < Im z <= 1/2")
    n = strip_shift(z)
    w = z - n
    word: List[int] = []
    while in_D_interior(w) and len(word) < max_k:
        m, w = ccf_step(w)
        word.append(m)
    if in_D_interior(w):
        raise RuntimeError("cell depth exceeded max_k")
    return n, word


def cell_data(z, max_k: int = 200):
    """(n, word, z_k, p_{k-1}, p_k, q_{k-1}, q_k) for the H cell containing z."""
    n, word = locate_H_cell(z, max_k)
    w = complex(z) - n
    p_prev, p_cur, q_prev, q_cur = 1, 0, 0, 1
    for m in word:
        w = 1.0 / w - m
        p_prev, p_cur = p_cur, m * p_cur + p_prev
        q_prev, q_cur = q_cur, m * q_cur + q_prev
    return n, word, w, p_prev, p_cur, q_prev, q_cur
