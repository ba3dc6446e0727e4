"""Complex dilogarithm and the two seed functions of the complex Brjuno sum.

Li2 is evaluated on the principal branch (cut [1, +inf)). Points with
|z| > 1 are inverted, points with Re z > 1/2 are reflected, and what is
left is summed either as the power series (|z| <= 1/2) or as the series in
u = -log(1 - z) with Bernoulli coefficients.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

PI = math.pi
PI2_6 = PI * PI / 6.0
LOG2 = math.log(2.0)
SNAP = 1e-12


class CutSide(enum.Enum):
    ABOVE = "above"
    BELOW = "below"
    OFF = "off"

    @property
    def sign(self) -> int:
        return {"above": 1, "below": -1, "off": 0}[self.value]

    def flipped(self) -> "CutSide":
        if self is CutSide.ABOVE:
            return CutSide.BELOW
        if self is CutSide.BELOW:
            return CutSide.ABOVE
        return self

    @classmethod
    def parse(cls, s) -> "CutSide":
        if isinstance(s, CutSide):
            return s
        if s is None:
            return cls.OFF
        s = str(s).lower()
        for c in cls:
            if c.value == s or c.name.lower() == s:
                return c
        if s in ("+", "up"):
            return cls.ABOVE
        if s in ("-", "down"):
            return cls.BELOW
        raise ValueError(f"unknown side {s!r}")


class OnCutError(ValueError):
    """Raised for an evaluation exactly on a branch cut with no side given."""


@lru_cache(maxsize=None)
def _bernoulli_coeffs(n_terms: int = 40):
    # B_n / (n+1)!, with B_1 = -1/2
    B = [Fraction(1)]
    for m in range(1, n_terms):
        s = Fraction(0)
        for k in range(m):
            s += math.comb(m + 1, k) * B[k]
        B.append(-s / (m + 1))
    return np.array([float(B[n] / math.factorial(n + 1)) for n in range(n_terms)])




def _series_small(v):
    # sum v^k/k^2 for |v| <= 1/2, Horner in reverse
    acc = np.zeros_like(v)
    for k in range(80, 0, -1):
        acc = acc * v + 1.0 / (k * k)
    return acc * v


def _series_bernoulli(v):
    u = -np.log1p(-v)
    c = _bernoulli_coeffs()
    acc = np.zeros_like(u)
    for coef in c[::-1]:
        acc = acc * u + coef
    return acc * u


def _li2_unit_disk(w):
    """Li2 on |w| <= 1 (principal branch, no cut inside)."""
    out = np.empty_like(w)
    one = w == 1.0
    refl = (w.real > 0.5) & ~one
    plain = ~refl & ~one
    out[one] = PI2_6
    if refl.any():
        wr = w[refl]
        v = 1.0 - wr
        out[refl] = PI2_6 - np.log(wr) * np.log(v) - _li2_core(v)
    if plain.any():
        out[plain] = _li2_core(w[plain])
    return out


def _li2_core(v):
    out = np.empty_like(v)
    small = np.abs(v) <= 0.5
    if small.any():
        out[small] = _series_small(v[small])
    if (~small).any():
        out[~small] = _series_bernoulli(v[~small])
    return out


def _li2_array(z, sgn):
    """Li2 at z; sgn = +1/-1 selects the side for points on the cut, 0 for none."""
    z = np.asarray(z, dtype=complex)
    sgn = np.broadcast_to(np.asarray(sgn), z.shape)
    on_cut = (np.abs(z.imag) <= SNAP) & (z.real > 1.0)
    bad = on_cut & (sgn == 0) & (z.imag == 0.0)
    if bad.any():
        raise OnCutError("Li2 evaluated on the cut [1, inf) without a side")
    snap = on_cut & (sgn != 0)
    z = np.where(snap, z.real + 0j, z)
    # side of each point relative to the real axis, used for log(-z) on the cut
    side = np.where(snap, sgn, np.sign(z.imag))
    out = np.empty_like(z)
    big = np.abs(z) > 1.0
    if big.any():
        zb = z[big]
        lg = np.log(-zb)
        cut_b = (zb.imag == 0.0) & (zb.real > 0.0)
        if cut_b.any():
            # z = t + i0*side  =>  -z = -t - i0*side  =>  arg = -side*pi
            lg = np.where(cut_b, np.log(np.abs(zb)) - 1j * PI * side[big], lg)
        out[big] = -PI2_6 - 0.5 * lg * lg - _li2_unit_disk(1.0 / zb)
    if (~big).any():
        out[~big] = _li2_unit_disk(z[~big])
    return out


def _side_sign(side) -> int:
    return CutSide.parse(side).sign


def li2(z, side=CutSide.OFF):
    """Principal dilogarithm, vectorized. side resolves points on [1, inf)."""
    scalar = np.isscalar(z)
    out = _li2_array(np.atleast_1d(np.asarray(z, dtype=complex)), _side_sign(side))
    return complex(out[0]) if scalar else out


def _log1m(w, wsgn):
    """log(1 - w) where w may sit on [1, inf) on side wsgn."""
    w = np.asarray(w, dtype=complex)
    wsgn = np.broadcast_to(np.asarray(wsgn), w.shape)
    on_cut = (np.abs(w.imag) <= SNAP) & (w.real > 1.0) & (wsgn != 0)
    base = np.log(1.0 - np.where(on_cut, w.real + 0j, w))
    # 1 - (t + i0 s) = (1 - t) - i0 s
    fixed = np.log(np.abs(1.0 - w.real)) - 1j * PI * wsgn
    return np.where(on_cut, fixed, base)


def _prep(z, side):
    scalar = np.isscalar(z)
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    return scalar, arr, _side_sign(side)


def _out(scalar, arr):
    return complex(arr[0]) if scalar else arr


# phi0 = -(1/pi) Li2(1/z); cut (0, 1]; z + i0 maps to 1/z - i0

def _phi0(z, s):
    if np.any(z == 0):
        raise ZeroDivisionError("phi0 at 0")
    return -_li2_array(1.0 / z, -s) / PI


def _phi0_d1(z, s):
    return -_log1m(1.0 / z, -s) / (PI * z)


def _phi0_d2(z, s):
    return (_log1m(1.0 / z, -s) - 1.0 / (z - 1.0)) / (PI * z * z)


def phi0(z, side=CutSide.OFF):
    scalar, arr, s = _prep(z, side)
    return _out(scalar, _phi0(arr, s))


def phi0_deriv(z, side=CutSide.OFF):
    scalar, arr, s = _prep(z, side)
    return _out(scalar, _phi0_d1(arr, s))


def phi0_deriv2(z, side=CutSide.OFF):
    scalar, arr, s = _prep(z, side)
    return _out(scalar, _phi0_d2(arr, s))


# phi1: cuts [1/2, 1) from Li2(z/(1-z)) (side kept) and (1, 2] from
# Li2(1/(z-1)) (side flipped)

PHI1_CONST = PI / 12.0 + LOG2 / PI


def _check_one(z):
    if np.any(z == 1.0):
        raise ZeroDivisionError("phi1 is singular at 1")


def _phi1(z, s):
    _check_one(z)
    w = z / (1.0 - z)
    v = 1.0 / (z - 1.0)
    return (z * _li2_array(w, s) - _li2_array(v, -s)) / PI + PI * z / 12.0 + LOG2 / PI


def _phi1_d1(z, s):
    _check_one(z)
    w = z / (1.0 - z)
    v = 1.0 / (z - 1.0)
    return (_li2_array(w, s) - _log1m(w, s) / (1.0 - z) - _log1m(v, -s) / (z - 1.0)) / PI + PI / 12.0


def _phi1_d2(z, s):
    _check_one(z)
    u = 1.0 / z - 1.0
    # z + i0 on (1/2, 1) gives u - i0
    return -_phi0_d2(u, -s) / z**3 + _phi0_d2(z - 1.0, s)


def phi1(z, side=CutSide.OFF):
    scalar, arr, s = _prep(z, side)
    return _out(scalar, _phi1(arr, s))


def phi1_deriv(z, side=CutSide.OFF):
    scalar, arr, s = _prep(z, side)
    return _out(scalar, _phi1_d1(arr, s))


def phi1_deriv2(z, side=CutSide.OFF):
    scalar, arr, s = _prep(z, side)
    return _out(scalar, _phi1_d2(arr, s))


def phi1_via_phi0(z, side=CutSide.OFF):
    """phi1 built from phi0 by one monoid step plus a translate; used as a cross-check."""
    scalar, arr, s = _prep(z, side)
    val = -arr * (_phi0(1.0 / arr - 1.0, -s) - PI / 12.0) + LOG2 / PI + _phi0(arr - 1.0, s)
    return _out(scalar, val)


LIMIT_AT_ONE = LOG2 / PI + 7.0 * PI / 12.0
