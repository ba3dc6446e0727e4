"""Operators on holomorphic functions off a real segment, and their real-grid counterparts.

Functions vanishing at infinity outside a segment [g0, g1] are represented
either by a closed form (HoloFunction) or by an expansion in powers of
1/s, where s is the exterior Joukowski coordinate of the segment
(FaberFunction). The transfer operator T = sum_m L_{g(m)} becomes a matrix
on the second representation, which is how the monoid sum is computed.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Tuple

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import special

from .cf_real import GOLDEN
from .dilog import (CutSide, phi0, phi0_deriv, phi0_deriv2, phi1, phi1_deriv,
                    phi1_deriv2)
from .mobius import Mat2Z

CAUCHY_NODES = 64


def _arr(z):
    return np.atleast_1d(np.asarray(z, dtype=complex))


def cut_distance(z, cut) -> np.ndarray:
    """Euclidean distance from z to the segment cut = (g0, g1)."""
    z = _arr(z)
    x = np.clip(z.real, cut[0], cut[1])
    return np.abs(z - x)


class HoloFunction:
    """A function holomorphic off a real segment and vanishing at infinity.

    func(z, s) takes a complex array and a side sign (+1 above the cut,
    -1 below, 0 off it). d1 and d2, when given, are the analytic first and
    second derivatives with the same signature.
    """

    def __init__(self, func, cut, d1=None, d2=None, tag: str = "", real: bool = False):
        self.func = func
        self.cut = (float(cut[0]), float(cut[1]))
        self.d1 = d1
        self.d2 = d2
        self.tag = tag
        self.real = real

    def __call__(self, z, side=CutSide.OFF):
        scalar = np.isscalar(z)
        out = np.asarray(self.func(_arr(z), CutSide.parse(side).sign), dtype=complex)
        return complex(out[0]) if scalar else out

    def deriv(self, z, order: int = 1):
        scalar = np.isscalar(z)
        arr = _arr(z)
        if order == 1 and self.d1 is not None:
            out = self.d1(arr, 0)
        elif order == 2 and self.d2 is not None:
            out = self.d2(arr, 0)
        else:
            out = cauchy_derivative(self, arr, order)
        out = np.asarray(out, dtype=complex)
        return complex(out[0]) if scalar else out

    def __add__(self, other: "HoloFunction") -> "HoloFunction":
        cut = (min(self.cut[0], other.cut[0]), max(self.cut[1], other.cut[1]))
        d1 = d2 = None
        if self.d1 and other.d1:
            d1 = lambda z, s: self.d1(z, s) + other.d1(z, s)
        if self.d2 and other.d2:
            d2 = lambda z, s: self.d2(z, s) + other.d2(z, s)
        return HoloFunction(lambda z, s: self.func(z, s) + other.func(z, s), cut, d1, d2,
                            f"({self.tag}+{other.tag})", self.real and other.real)

    def scaled(self, c: complex) -> "HoloFunction":
        d1 = (lambda z, s: c * self.d1(z, s)) if self.d1 else None
        d2 = (lambda z, s: c * self.d2(z, s)) if self.d2 else None
        real = self.real and complex(c).imag == 0
        return HoloFunction(lambda z, s: c * self.func(z, s), self.cut, d1, d2,
                            f"{c}*{self.tag}", real)

    def __sub__(self, other):
        return self + other.scaled(-1.0)


def cauchy_derivative(f, z, order: int = 1, radius=None, nodes: int = CAUCHY_NODES):
    """order-th derivative by the trapezoid rule on a circle.

    The default radius is half the distance to the cut of f.
    """
    z = _arr(z)
    if radius is None:
        radius = 0.5 * cut_distance(z, f.cut)
        if np.any(radius <= 0):
            raise ValueError("derivative requested on the cut")
    radius = np.broadcast_to(np.asarray(radius, dtype=float), z.shape)
    th = 2 * np.pi * np.arange(nodes) / nodes
    e = np.exp(1j * th)
    w = z[:, None] + radius[:, None] * e[None, :]
    vals = np.asarray(f.func(w.ravel(), 0), dtype=complex).reshape(w.shape)
    s = (vals * np.exp(-1j * order * th)[None, :]).mean(axis=1)
    return math.factorial(order) * s / radius**order


# --- seed functions ---------------------------------------------------------

def phi0_function() -> HoloFunction:
    """-(1/pi) Li2(1/z), holomorphic off [0, 1]."""
    return HoloFunction(lambda z, s: phi0(z, _side(s)), (0.0, 1.0),
                        lambda z, s: phi0_deriv(z, _side(s)),
                        lambda z, s: phi0_deriv2(z, _side(s)), "phi0", True)


def phi1_function() -> HoloFunction:
    """The seed of the periodized sum, holomorphic off [1/2, 2]."""
    return HoloFunction(lambda z, s: phi1(z, _side(s)), (0.5, 2.0),
                        lambda z, s: phi1_deriv(z, _side(s)),
                        lambda z, s: phi1_deriv2(z, _side(s)), "phi1", True)


def _side(s: int) -> CutSide:
    return {1: CutSide.ABOVE, -1: CutSide.BELOW}.get(int(s), CutSide.OFF)


def zero_function(cut=(0.0, 1.0)) -> HoloFunction:
    z0 = lambda z, s: np.zeros_like(z)
    return HoloFunction(z0, cut, z0, z0, "0", True)


# --- homographic actions ----------------------------------------------------

def _image_cut(g: Mat2Z, cut):
    ends = []
    for x in cut:
        den = g.c * x + g.d
        if den == 0:
            raise ValueError("the cut is sent through infinity")
        ends.append((g.a * x + g.b) / den)
    return (min(ends), max(ends))


def lgk_apply(g: Mat2Z, k: int, phi: HoloFunction) -> HoloFunction:
    """(a - cz)^(-k) phi((dz - b)/(a - cz))."""
    a, b, c, d = g.tuple()
    e = g.det

    def f(z, s):
        den = a - c * z
        if np.any(den == 0):
            raise ZeroDivisionError("evaluation at the pole a/c")
        return den ** (-k) * phi.func((d * z - b) / den, s * e)

    return HoloFunction(f, _image_cut(g, phi.cut), tag=f"L{k}[{g}]{phi.tag}", real=phi.real)


def _segment_far(w0, w1, cut, ratio: float = 0.25):
    # the segment [w0, w1] keeps a distance >= ratio * length from the cut
    w0 = np.broadcast_to(w0, w1.shape)
    length = np.abs(w1 - w0)
    t = np.linspace(0.0, 1.0, 33)
    pts = w0[:, None] + (w1 - w0)[:, None] * t[None, :]
    dist = cut_distance(pts.ravel(), cut).reshape(pts.shape).min(axis=1)
    return dist >= ratio * np.maximum(length, 1e-300)


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _remainder_integral(phi: HoloFunction, w0, delta, panels: int = 4, order: int = 16):
    """int_0^1 phi''(w0 + t delta)(1 - t) dt by composite Gauss-Legendre."""
    x, wts = _gauss_legendre(order)
    tt = np.concatenate([(j + x) / panels for j in range(panels)])
    ww = np.concatenate([wts / panels] * panels)
    w0 = np.broadcast_to(w0, delta.shape)
    pts = w0[:, None] + delta[:, None] * tt[None, :]
    vals = phi.deriv(pts.ravel(), 2).reshape(pts.shape)
    return (vals * ((1.0 - tt) * ww)[None, :]).sum(axis=1)


def lg_apply(g: Mat2Z, phi: HoloFunction) -> HoloFunction:
    """The affine-corrected action landing back in functions vanishing at infinity.

    Away from the image cut the Taylor-remainder integral is used; close to
    it the algebraic form (value difference plus derivative correction).
    """
    a, b, c, d = g.tuple()
    e = g.det
    if c == 0:
        # translation-type element: no correction is needed
        def ft(z, s):
            return a * phi.func((d * z - b) / a, s * e)
        return HoloFunction(ft, _image_cut(g, phi.cut), tag=f"L[{g}]{phi.tag}", real=phi.real)
    w0 = -d / c
    if phi.cut[0] <= w0 <= phi.cut[1]:
        raise ValueError("-d/c lies on the cut of phi")
    p0 = complex(phi(w0))
    dp0 = complex(phi.deriv(w0, 1))

    def f(z, s):
        den = a - c * z
        if np.any(den == 0):
            raise ZeroDivisionError("evaluation at the pole a/c")
        delta = e / (c * den)
        out = np.empty_like(z)
        far = _segment_far(np.asarray(w0, dtype=complex), w0 + delta, phi.cut)
        if far.any():
            out[far] = _remainder_integral(phi, w0, delta[far]) / (c * c * den[far])
        near = ~far
        if near.any():
            dn = den[near]
            out[near] = dn * (phi.func(w0 + delta[near], s * e) - p0) - e * dp0 / c
        return out

    return HoloFunction(f, _image_cut(g, phi.cut), tag=f"L[{g}]{phi.tag}", real=phi.real)


# --- the transfer operator, pointwise ----------------------------------------

def _zeta3(m: int) -> float:
    return float(special.zeta(3.0, m + 1))


def _outside_window(moments, u: complex, z: complex, lo: int, hi: int) -> complex:
    """sum over m >= 1 outside [lo, hi] of -z (phi(u - m) - phi(-m)) + phi'(-m),
    with phi given by its Laurent moments about the cut center."""
    c, mom = moments
    a, b = mpmath.mpc(u - c), mpmath.mpf(-c)

    def ranged(x, k):
        # sum over m in [1, lo - 1] and [hi + 1, inf) of (x - m)^-k, k >= 2
        s = mpmath.zeta(k, hi + 1 - x)
        if lo > 1:
            s += mpmath.zeta(k, 1 - x) - mpmath.zeta(k, lo - x)
        return (-1) ** k * s

    def log_part(x):
        # the same for k = 1, up to a constant shared by x = a and x = b
        s = mpmath.digamma(hi + 1 - x)
        if lo > 1:
            s += mpmath.digamma(1 - x) - mpmath.digamma(lo - x)
        return s

    g = mom[0] * complex(log_part(a) - log_part(b))
    d = 0j
    for j in range(1, len(mom)):
        g += mom[j] * complex(ranged(a, j + 1) - ranged(b, j + 1))
    for j in range(len(mom)):
        d += -(j + 1) * mom[j] * complex(ranged(b, j + 2))
    return -z * g + d


def _t_point(phi: HoloFunction, z: complex, m_max: int) -> Tuple[complex, float]:
    u = 1.0 / z
    if abs(u) > m_max:
        # far from 0: sum a window around Re u, the rest from the Laurent moments
        lo = max(1, math.floor(u.real) - m_max)
        hi = math.floor(u.real) + m_max
        m = np.arange(lo, hi + 1, dtype=float)
    else:
        lo = hi = None
        M = m_max + int(math.ceil(abs(u)))
        m = np.arange(1, M + 1, dtype=float)
    img = u - m
    # z + i0 s goes to 1/z - i0 s
    vals = phi.func(img, 0)
    pm = phi.func(-m + 0j, 0)
    dpm = phi.deriv(-m + 0j, 1)
    terms = -z * (vals - pm) + dpm
    if hi is not None:
        rest = _outside_window(_moments_of(phi), u, z, lo, hi)
        # exact apart from rounding in the moments
        return complex(terms.sum() + rest), 1e-12
    # terms decay like m^-3; the tail is estimated from the last one
    tail = terms[-1] * M**3 * _zeta3(M)
    return complex(terms.sum() + tail), abs(tail)


def _moments_of(phi: HoloFunction):
    mom = getattr(phi, "_mom", None)
    if mom is None:
        mom = laurent_moments(phi, 30)
        phi._mom = mom
    return mom


def t_apply(phi: HoloFunction, m_max: int = 200) -> HoloFunction:
    """T phi = sum_{m >= 1} L_{g(m)} phi, summed pointwise up to m_max (+ the points
    needed near 0) with an m^-3 tail correction.

    The returned function carries tail(z), the size of that correction
    (a heuristic estimate, not a bound).
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")

    def f(z, s):
        return np.array([_t_point(phi, complex(v), m_max)[0] for v in z])

    out = HoloFunction(f, (0.0, 1.0), tag=f"T{phi.tag}", real=phi.real)
    out.tail = lambda z: max(_t_point(phi, complex(v), m_max)[1] for v in np.atleast_1d(z))
    return out


def t_apply_grouped(phi: HoloFunction, z0: complex, m_max: int = 200) -> complex:
    """T phi(z0) regrouped as -z0[phi(z1) + phi(z1-1) + e phi(z1+1)] + remainder,
    where z1 = 1/z0 - m1 is one complex continued-fraction step (e = 0 if m1 = 1)."""
    from .cf_complex import ccf_step
    z0 = complex(z0)
    m1, z1 = ccf_step(z0)
    eps = 1 if m1 > 1 else 0
    principal = -z0 * (phi(z1) + phi(z1 - 1) + eps * phi(z1 + 1))
    M = m_max + m1 + 1
    m = np.arange(1, M + 1, dtype=float)
    dpm = phi.deriv(-m + 0j, 1)
    pm = phi(-m + 0j)
    far = np.abs(m - m1) > 1
    rem = dpm.sum() - z0 * (phi(z1 + m1 - m[far]) - pm[far]).sum() + z0 * pm[~far].sum()
    last = dpm[-1] - z0 * (phi(z1 + m1 - M) - pm[-1])
    return complex(principal + rem + last * M**3 * _zeta3(M))


# --- Faber representation on a segment ----------------------------------------

def joukowski_s(w, cut):
    """Exterior coordinate s with |s| > 1 off the cut and w = c + h (s + 1/s)/2."""
    c = 0.5 * (cut[0] + cut[1])
    h = 0.5 * (cut[1] - cut[0])
    zeta = (_arr(w) - c) / h
    r = np.sqrt(zeta - 1.0) * np.sqrt(zeta + 1.0)
    return zeta + r, zeta, r


def joukowski_rho(w, cut) -> np.ndarray:
    return np.abs(joukowski_s(w, cut)[0])


FABER_NODES = 96
FABER_RHO = 2.0
RHO_SAFE = 1.9


class FaberFunction(HoloFunction):
    """sum_k a_k s^-k on the exterior of a segment."""

    def __init__(self, coeffs, cut=(0.0, 1.0), tag: str = "", real: bool = False):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        super().__init__(self._eval, cut, self._d1, self._d2, tag, real)
        self._h = 0.5 * (self.cut[1] - self.cut[0])

    def _sums(self, z, weight_pow: int):
        s, zeta, r = joukowski_s(z, self.cut)
        t = 1.0 / s
        k = np.arange(1, len(self.coeffs) + 1, dtype=float)
        c = np.concatenate([[0.0], self.coeffs * k**weight_pow])
        return npoly.polyval(t, c), zeta, r

    def _eval(self, z, s=0):
        return self._sums(z, 0)[0]

    def _d1(self, z, s=0):
        g1, zeta, r = self._sums(z, 1)
        return -g1 / (self._h * r)

    def _d2(self, z, s=0):
        g1, zeta, r = self._sums(z, 1)
        g2 = self._sums(z, 2)[0]
        return (g2 + g1 * zeta / r) / (self._h**2 * r * r)


def faber_nodes(cut=(0.0, 1.0), n: int = FABER_NODES, rho: float = FABER_RHO):
    th = 2 * np.pi * np.arange(n) / n
    s = rho * np.exp(1j * th)
    c = 0.5 * (cut[0] + cut[1])
    h = 0.5 * (cut[1] - cut[0])
    return c + h * 0.5 * (s + 1.0 / s)


def faber_coeffs_from_values(vals, rho: float = FABER_RHO) -> np.ndarray:
    n = len(vals)
    k = np.arange(1, n)
    return np.fft.ifft(vals)[1:] * rho**k


def faber_from_function(phi: HoloFunction, cut=(0.0, 1.0), n: int = FABER_NODES,
                        rho: float = FABER_RHO) -> FaberFunction:
    vals = phi(faber_nodes(cut, n, rho))
    return FaberFunction(faber_coeffs_from_values(vals, rho), cut, f"F[{phi.tag}]", phi.real)


@lru_cache(maxsize=8)
def _t_node_matrix(n: int, rho: float, m_max: int) -> np.ndarray:
    """Values of T(s^-k) at the sampling nodes, k = 1..n-1 (cut [0, 1])."""
    cut = (0.0, 1.0)
    h = 0.5
    z = faber_nodes(cut, n, rho)
    m = np.arange(1, m_max + 1, dtype=float)
    t = 1.0 / joukowski_s((1.0 / z[:, None] - m[None, :]).ravel(), cut)[0].reshape(n, m_max)
    sm, zm, rm = joukowski_s(-m + 0j, cut)
    tm = 1.0 / sm
    A = np.zeros((n, n - 1), dtype=complex)
    P = np.ones_like(t)
    Pm = np.ones_like(tm)
    z3 = m_max**3 * _zeta3(m_max)
    for k in range(1, n):
        P = P * t
        Pm = Pm * tm
        terms = -z[:, None] * (P - Pm[None, :]) + (-k * Pm / (h * rm))[None, :]
        A[:, k - 1] = terms.sum(axis=1) + terms[:, -1] * z3
    return A


@lru_cache(maxsize=8)
def t_matrix(n: int = FABER_NODES, rho: float = FABER_RHO, m_max: int = 2000) -> np.ndarray:
    """T acting on Faber coefficients (cut [0, 1])."""
    A = _t_node_matrix(n, rho, m_max)
    k = np.arange(1, n)
    return (np.fft.ifft(A, axis=0)[1:] * (rho**k)[:, None])


class MonoidSum(FaberFunction):
    """sum_{r <= depth} T^r phi, stored as Faber coefficients on [0, 1].

    Near the cut (|s| < RHO_SAFE) the value is obtained from S = phi + T S,
    recursing on the one or two images 1/z - m that are still close to it.
    """

    def __init__(self, phi: HoloFunction, depth: int, m_max: int, n: int = FABER_NODES):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.base = phi
        self.depth = depth
        self.m_max = m_max
        base = faber_from_function(phi, (0.0, 1.0), n)
        T = t_matrix(n, FABER_RHO, m_max)
        terms = [base.coeffs]
        for _ in range(depth):
            terms.append(T @ terms[-1])
        self.term_coeffs = terms
        super().__init__(np.sum(terms, axis=0), (0.0, 1.0), f"SumM[{phi.tag}]", phi.real)
        last = np.max(np.abs(FaberFunction(terms[-1])(faber_nodes())))
        self.tail = last * GOLDEN / (1.0 - GOLDEN)

    def term(self, r: int) -> FaberFunction:
        return FaberFunction(self.term_coeffs[r], (0.0, 1.0), f"T^{r}", self.real)

    def _eval(self, z, s=0):
        z = _arr(z)
        out = np.empty_like(z)
        far = joukowski_rho(z, self.cut) >= RHO_SAFE
        if far.any():
            out[far] = FaberFunction._eval(self, z[far])
        for i in np.nonzero(~far)[0]:
            out[i] = self._near(complex(z[i]), 0)
        return out

    def _near(self, w: complex, level: int) -> complex:
        if level > 400:
            raise RuntimeError("near-cut recursion did not terminate")
        if w.imag == 0 and 0 <= w.real <= 1:
            raise ValueError("evaluation on the cut")
        u = 1.0 / w
        if abs(u) > self.m_max:
            # direct window around Re u, the rest from the Laurent moments
            lo = max(1, math.floor(u.real) - self.m_max)
            hi = math.floor(u.real) + self.m_max
            m = np.arange(lo, hi + 1, dtype=float)
        else:
            lo, hi = 1, None
            M = self.m_max + int(math.ceil(abs(u)))
            m = np.arange(1, M + 1, dtype=float)
        img = u - m
        vals = np.empty_like(img)
        far = joukowski_rho(img, self.cut) >= RHO_SAFE
        vals[far] = FaberFunction._eval(self, img[far])
        for i in np.nonzero(~far)[0]:
            vals[i] = self._near(complex(img[i]), level + 1)
        sm = FaberFunction._eval(self, -m + 0j)
        dsm = FaberFunction._d1(self, -m + 0j)
        terms = -w * (vals - sm) + dsm
        if hi is None:
            total = terms.sum() + terms[-1] * M**3 * _zeta3(M)
        else:
            if "_mom" not in self.__dict__:
                self._mom = laurent_moments(self, 30)
            total = terms.sum() + _outside_window(self._mom, u, w, lo, hi)
        return complex(self.base(w) + total)

    def _d1(self, z, s=0):
        z = _arr(z)
        if np.all(joukowski_rho(z, self.cut) >= RHO_SAFE):
            return FaberFunction._d1(self, z)
        return cauchy_derivative(self, z, 1)

    def _d2(self, z, s=0):
        z = _arr(z)
        if np.all(joukowski_rho(z, self.cut) >= RHO_SAFE):
            return FaberFunction._d2(self, z)
        return cauchy_derivative(self, z, 2)


def sum_over_monoid(phi: HoloFunction, depth: int = 40, m_max: int = 2000) -> MonoidSum:
    """sum_{r <= depth} T^r phi for phi holomorphic off a subsegment of [0, 1].

    The attribute tail is the geometric estimate |T^depth phi| g/(1-g) with
    g = (sqrt5 - 1)/2, measured on the sampling ellipse.
    """
    if phi.cut[0] < 0 or phi.cut[1] > 1:
        raise ValueError("phi must be holomorphic off a subsegment of [0, 1]")
    return MonoidSum(phi, depth, m_max)


def dinf_sample(n: int = 100, seed: int = 0) -> np.ndarray:
    """n points of the region D_inf (outside the union of the CF cells), |z| <= 3."""
    from .cf_complex import in_Dinf
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if abs(z) <= 3 and in_Dinf(z):
            pts.append(z)
    return np.array(pts)


def monoid_term_ratios(phi: HoloFunction, depth: int = 20, sample=None, m_max: int = 2000):
    """sup-norm ratios |T^{r+1} phi| / |T^r phi| over a sample of D_inf."""
    ms = sum_over_monoid(phi, depth, m_max)
    pts = dinf_sample() if sample is None else sample
    norms = [np.max(np.abs(ms.term(r)(pts))) for r in range(depth + 1)]
    return [norms[r + 1] / norms[r] for r in range(depth)]


# --- periodization -------------------------------------------------------------

def laurent_moments(phi: HoloFunction, n_moments: int = 30, n_nodes: int = 64):
    """Coefficients M_j of phi(w) = sum_j M_j (w - c)^-(j+1) about the cut center c."""
    c = 0.5 * (phi.cut[0] + phi.cut[1])
    h = 0.5 * (phi.cut[1] - phi.cut[0])
    R = 2.0 * h + 0.5
    th = 2 * np.pi * np.arange(n_nodes) / n_nodes
    vals = phi(c + R * np.exp(1j * th))
    coef = np.fft.ifft(vals)  # coef[j] = mean(f e^{i j th})
    j = np.arange(n_moments)
    return c, coef[(j + 1) % n_nodes] * R ** (j + 1)


def _far_field(u: complex, N: int, moments) -> complex:
    # sum over |n| > N of sum_j M_j (u - n)^-(j+1), symmetric in n
    total = moments[0] * complex(special.psi(N + 1 - u) - special.psi(N + 1 + u))
    a_minus = mpmath.mpc(N + 1 - u)
    a_plus = mpmath.mpc(N + 1 + u)
    for j in range(1, len(moments)):
        k = j + 1
        if abs(moments[j]) == 0:
            continue
        s = (-1) ** k * mpmath.zeta(k, a_minus) + mpmath.zeta(k, a_plus)
        total += moments[j] * complex(s)
    return total


def a0_fit(phi: HoloFunction) -> complex:
    """a0 from phi(z) = a0 log(z/(z-1)) + O(1/z^2), fitted at z = -1e3 and -1e4."""
    zs = np.array([-1e3, -1e4], dtype=complex)
    v = phi(zs)
    L = np.log(zs / (zs - 1.0))
    # phi ~ a0 L + b/z^2: eliminate b
    w = 1.0 / zs**2
    return complex((v[0] * w[1] - v[1] * w[0]) / (L[0] * w[1] - L[1] * w[0]))


def periodize(phi: HoloFunction, z: complex, n_max: int = 8, mode: str = "moments",
              n_moments: int = 30) -> Tuple[complex, float]:
    """Regularized sum over integer translates of phi at z: (value, tail).

    The value is the limit of the symmetric partial sums, which equals the
    sum of the part vanishing to second order minus a0*pi*i (Im z > 0), or
    plus a0*pi*i (Im z < 0), where a0 is the coefficient of log(z/(z-1)).

    mode "moments": translates with |n - n_c| <= n_max summed directly, the
    rest from the Laurent moments of phi (digamma and Hurwitz zeta), exact
    up to rounding. mode "fit": only a0 (fitted on the negative axis) is
    used for the far field. mode "symmetric": the plain partial sum.
    """
    z = complex(z)
    if z.imag == 0:
        raise ValueError("periodize needs Im z != 0")
    c = 0.5 * (phi.cut[0] + phi.cut[1])
    h = 0.5 * (phi.cut[1] - phi.cut[0])
    n_max = max(n_max, int(math.ceil(h)) + 3)
    nc = round(z.real - c)
    n = np.arange(nc - n_max, nc + n_max + 1)
    direct = complex(np.sum(phi(z - n)))
    u = z - c - nc
    if mode == "moments":
        cache = phi.__dict__.setdefault("_moments", {})
        if n_moments not in cache:
            cache[n_moments] = laurent_moments(phi, n_moments)[1]
        mom = cache[n_moments]
        far = _far_field(u, n_max, mom)
        tail = abs(mom[-1]) * 2 * (n_max - abs(u.real)) ** (-n_moments) + 1e-15 * abs(direct)
        return direct + far, float(tail)
    if mode == "fit":
        a0 = a0_fit(phi)
        far = a0 * complex(special.psi(n_max + 1 - u) - special.psi(n_max + 1 + u))
        # the dropped second-order part sums to about 2 N |phi(-N) - a0 log(...)|
        x = complex(-n_max + c, 0.0)
        resid = phi(x) - a0 * cmath.log(x / (x - 1.0))
        tail = 3.0 * n_max * abs(resid) + 1e-15 * abs(direct)
        return direct + far, float(tail)
    if mode == "symmetric":
        a0 = a0_fit(phi)
        x = complex(-n_max + c, 0.0)
        resid = phi(x) - a0 * cmath.log(x / (x - 1.0))
        tail = 2.0 * abs(a0) * (abs(u) + 1.0) / n_max + 3.0 * n_max * abs(resid)
        return direct, float(tail)
    raise ValueError(f"unknown mode {mode}")


# --- real-level operators ----------------------------------------------------------

@dataclass
class RealGridFn:
    """Samples on the uniform grid of [0, length]."""
    values: np.ndarray
    length: float = 1.0
    tail: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 2:
            raise ValueError("need at least two samples")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("samples must be finite")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, len(self.values))

    @classmethod
    def from_callable(cls, f, n: int = 2**16, length: float = 1.0) -> "RealGridFn":
        x = np.linspace(0.0, length, n)
        return cls(np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy(), length)

    def __call__(self, x):
        return np.interp(x, self.x, self.values, left=0.0, right=0.0)


def t_real_apply(f: RealGridFn) -> RealGridFn:
    """(Tf)(x) = x f(1/x - m) on (1/(m+1), 1/m], with (Tf)(0) = 0."""
    if f.length != 1.0:
        raise ValueError("grid must be on [0, 1]")
    x = f.x
    out = np.zeros_like(x)
    pos = x > 0
    y = 1.0 / x[pos]
    m = np.floor(y)
    frac = np.clip(y - m, 0.0, 1.0)
    out[pos] = x[pos] * np.interp(frac, f.x, f.values)
    return RealGridFn(out, 1.0)


def t_even_real_apply(f: RealGridFn, m_max: Optional[int] = None) -> RealGridFn:
    """sum_{m>=2} x f(1/x - m) + sum_{m>=3} x f(m - 1/x), f taken as 0 off [0, 1/2].

    For each x at most one m contributes to each sum. With m_max the terms
    with m > m_max are dropped and their size is returned as the tail.
    """
    if abs(f.length - 0.5) > 1e-15:
        raise ValueError("grid must be on [0, 1/2]")
    x = f.x
    out = np.zeros_like(x)
    dropped = 0.0
    pos = x > 0
    xp = x[pos]
    y = 1.0 / xp
    vals = np.zeros_like(xp)
    m1 = np.floor(y)
    r1 = y - m1
    ok1 = (m1 >= 2) & (r1 <= 0.5)
    m2 = np.ceil(y)
    r2 = m2 - y
    ok2 = (m2 >= 3) & (r2 <= 0.5)
    c1 = xp * np.interp(r1, f.x, f.values)
    c2 = xp * np.interp(r2, f.x, f.values)
    if m_max is not None:
        drop1 = ok1 & (m1 > m_max)
        drop2 = ok2 & (m2 > m_max)
        dropped = float(max(np.max(np.abs(c1[drop1]), initial=0.0), np.max(np.abs(c2[drop2]), initial=0.0)))
        ok1 &= ~drop1
        ok2 &= ~drop2
    vals += np.where(ok1, c1, 0.0) + np.where(ok2, c2, 0.0)
    out[pos] = vals
    return RealGridFn(out, 0.5, dropped)


def grid_norm(f: RealGridFn, norm: str = "L2") -> float:
    """L2 norm, or the L2 norm for the weight 1/(2 sqrt(x(1-x))) on [0, 1]."""
    if norm == "L2":
        return float(np.sqrt(np.trapezoid(f.values**2, f.x)))
    if norm == "weighted":
        # x = L sin^2(t) turns the weight into dt (up to the constant)
        th = np.linspace(0.0, np.pi / 2, len(f.values))
        v = f(f.length * np.sin(th) ** 2)
        return float(np.sqrt(np.trapezoid(v**2, th)))
    raise ValueError(f"unknown norm {norm}")


def spectral_radius_estimate(f0: RealGridFn, k: int = 12, norm: str = "L2") -> float:
    """(|T^k f0| / |f0|)^(1/k) on the grid of f0."""
    if k < 2:
        raise ValueError("k must be >= 2")
    n0 = grid_norm(f0, norm)
    if n0 == 0:
        return 0.0
    f = f0
    for _ in range(k):
        f = t_real_apply(f)
    return float((grid_norm(f, norm) / n0) ** (1.0 / k))
