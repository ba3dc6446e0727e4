"""The complex Brjuno function by two independent routes, and boundary experiments.

Farey route: the explicit series over all rationals p/q, each term built
from the Farey parents of p/q and two dilogarithms. Every term is a Laurent
series in 1/(z - p/q) (its coefficients come from Taylor coefficients of
Li2 at -q'/q and -q''/q), which is summed directly away from p/q; close to
p/q the closed dilogarithm form is used.

Monoid route: phi1 plus the monoid sum of T phi1, periodized.

Both routes sum integer translates as the limit of symmetric partial sums.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .cf_complex import cell_data
from .cf_real import CFDigits, GOLDEN, brjuno_finite, brjuno_real, expand_cf
from .dilog import LOG2, PI, CutSide, li2, phi1
from .operators import periodize, phi1_function, sum_over_monoid, t_apply
from .rational import Rational, reduce


class Method(enum.Enum):
    FAREY = "farey"
    MONOID = "monoid"


@dataclass
class BrjunoEval:
    value: complex
    method: Method
    truncation: int  # qmax (farey) or depth (monoid)
    window: float
    tail_estimate: float
    terms_used: int
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tail_estimate < 0 or self.terms_used < 1:
            raise ValueError("invalid BrjunoEval")


# --- Farey route ----------------------------------------------------------------

LAURENT_TERMS = 32
EPS_SWITCH = 0.3  # |1/(q(qz - p))| above this uses the closed form


def _li2_taylor(a: np.ndarray, n: int) -> np.ndarray:
    """Taylor coefficients u_1..u_n of Li2 at real points a in [-1, 0].

    From x Li2'(x) = -log(1 - x): a (k+1) u_{k+1} + k u_k = 1/(k (1-a)^k),
    run downwards (stable for |a| <= 1).
    """
    extra = 60
    top = n + extra
    u = np.zeros((len(a), top + 2))
    for k in range(top, 0, -1):
        u[:, k] = (1.0 / (k * (1.0 - a) ** k) - a * (k + 1) * u[:, k + 1]) / k
    return u[:, 1:n + 2]  # u_1 .. u_{n+1}


@dataclass
class FareyTable:
    qmax: int
    p: np.ndarray
    q: np.ndarray
    pl: np.ndarray
    ql: np.ndarray
    pr: np.ndarray
    qr: np.ndarray
    coef: np.ndarray  # (terms, K): F = -(1/pi) sum_k coef_k eps^k, eps = 1/(q(qz-p))
    const: np.ndarray  # (1/q) log((q + q'')/(q + q'))
    moments: np.ndarray  # Laurent moments of the cell sum about 1/2
    a0_layers: np.ndarray  # per-denominator totals of the 1/z coefficients


def _farey_arrays(qmax: int):
    ps, qs, pls, qls = [], [], [], []
    for q in range(1, qmax + 1):
        for p in range(1, q + 1):
            if math.gcd(p, q) != 1:
                continue
            if q == 1:
                pl, ql = p - 1, 1
            else:
                ql = pow(p, -1, q)
                pl = (p * ql - 1) // q
            ps.append(p)
            qs.append(q)
            pls.append(pl)
            qls.append(ql)
    p = np.array(ps, dtype=np.int64)
    q = np.array(qs, dtype=np.int64)
    pl = np.array(pls, dtype=np.int64)
    ql = np.array(qls, dtype=np.int64)
    pr = p - pl
    qr = q - ql
    q1 = q == 1
    pr[q1], qr[q1] = 1, 0
    return p, q, pl, ql, pr, qr


@lru_cache(maxsize=4)
def farey_table(qmax: int, n_moments: int = 60) -> FareyTable:
    p, q, pl, ql, pr, qr = _farey_arrays(qmax)
    K = LAURENT_TERMS
    qf = q.astype(float)
    ul = _li2_taylor(-ql / qf, K)
    ur = _li2_taylor(-qr / qf, K)
    k = np.arange(1, K + 1)
    sign = (-1.0) ** k
    coef = (-(ul[:, :K] * sign) / qf[:, None] + (ql / qf**2)[:, None] * ul[:, 1:] * sign
            + ur[:, :K] / qf[:, None] - (qr / qf**2)[:, None] * ur[:, 1:])
    const = np.log((qf + qr) / (qf + ql)) / qf
    moments = _farey_moments(p / qf, qf, coef, n_moments)
    a0 = np.bincount(q, weights=-coef[:, 0] / PI / qf**2, minlength=qmax + 1)
    return FareyTable(qmax, p, q, pl, ql, pr, qr, coef, const, moments, a0)


def _farey_moments(r, qf, coef, n_moments, center=0.5, chunk=20000):
    """M_n with sum over (0,1] of the terms = sum_n M_n (w - center)^-n."""
    K = coef.shape[1]
    G = np.zeros((K, n_moments))
    for i in range(0, len(r), chunk):
        C = -coef[i:i + chunk] / PI * qf[i:i + chunk, None] ** (-2.0 * np.arange(1, K + 1))
        P = (r[i:i + chunk, None] - center) ** np.arange(n_moments)
        G += C.T @ P
    M = np.zeros(n_moments + 1)
    for n in range(1, n_moments + 1):
        for kk in range(1, min(K, n) + 1):
            j = n - kk
            M[n] += math.comb(n - 1, j) * G[kk - 1, j]
    return M


def _closed_terms(z, p, q, pl, ql, pr, qr, const, s):
    zf = complex(z)
    den = q * zf - p
    t1 = (pl - ql * zf) * (li2((pl - ql * zf) / den, _side(s)) - li2(-ql / q + 0j))
    # the second argument sits on the other side of the real axis
    t2 = (pr - qr * zf) * (li2((pr - qr * zf) / den, _side(-s)) - li2(-qr / q + 0j))
    return -(t1 + t2 + const) / PI


def _side(s):
    return {1: CutSide.ABOVE, -1: CutSide.BELOW}.get(s, CutSide.OFF)


def _cell_terms(tab: FareyTable, w: complex) -> np.ndarray:
    """All terms p/q in (0,1], q <= qmax, evaluated at w."""
    qf = tab.q.astype(float)
    eps = 1.0 / (qf * (qf * w - tab.p))
    out = np.zeros(len(qf), dtype=complex)
    ae = np.abs(eps)
    lau = ae <= EPS_SWITCH
    lo = 0.0
    # fewer Laurent terms where eps is small: |eps|^K stays below 1e-17
    for hi, K in ((1e-4, 5), (1e-2, 9), (0.1, 17), (EPS_SWITCH, tab.coef.shape[1])):
        sel = (ae > lo) & (ae <= hi) if lo > 0 else ae <= hi
        lo = hi
        if not sel.any():
            continue
        e = eps[sel]
        c = tab.coef[sel, :K]
        acc = c[:, -1].astype(complex)
        for k in range(K - 2, -1, -1):
            acc = acc * e + c[:, k]
        out[sel] = -(acc * e) / PI
    idx = np.nonzero(~lau)[0]
    if len(idx):
        s = 1 if w.imag > 0 else -1
        out[idx] = _closed_terms(w, tab.p[idx].astype(float), qf[idx], tab.pl[idx].astype(float),
                                 tab.ql[idx].astype(float), tab.pr[idx].astype(float),
                                 tab.qr[idx].astype(float), tab.const[idx], s)
    return out


def _farey_far(moments, u: complex, N: int, n_sum: int = 200) -> complex:
    """sum over |n| > N of sum_k M_k (u - n)^-k, symmetric in n.

    k = 1 by the digamma difference; k >= 2 by direct summation up to
    n_sum plus the midpoint-integral remainder.
    """
    total = moments[1] * complex(special.psi(N + 1 - u) - special.psi(N + 1 + u))
    n = np.arange(N + 1, n_sum + 1, dtype=float)
    a_minus = u - n
    a_plus = u + n
    for k in range(2, len(moments)):
        if moments[k] == 0:
            continue
        s = np.sum(a_minus ** (-k)) + np.sum(a_plus ** (-k))
        # int_{n_sum + 1/2}^inf of (u -+ t)^-k dt
        s += ((n_sum + 0.5 - u) ** (1 - k) * (-1) ** k + (u + n_sum + 0.5) ** (1 - k)) / (k - 1)
        total += moments[k] * s
    return complex(total)


def _layer_sums(tab: FareyTable, terms: np.ndarray) -> np.ndarray:
    re = np.bincount(tab.q, weights=terms.real, minlength=tab.qmax + 1)
    im = np.bincount(tab.q, weights=terms.imag, minlength=tab.qmax + 1)
    return re + 1j * im


def brjuno_farey(z, qmax: int = 300, window: float = 3.0, extrapolate: bool = True) -> BrjunoEval:
    """The Farey series truncated at denominators <= qmax.

    Translates of (0,1] within `window` of Re z are summed term by term; the
    remaining translates are summed through the Laurent moments of the
    truncated cell sum, so nothing is dropped.

    The sum over q > qmax is dominated by the log-term constants -a0*pi*i
    of the omitted terms, which do not depend on z. The per-denominator a0
    totals follow phi(q)/q^3 closely; their constant is fitted on (qmax/2,
    qmax] and the series beyond qmax is summed (added when extrapolate is
    set). The z-dependent rest is estimated the same way from the layers
    with each term's 1/(z - p/q) part removed, and enters the tail only.
    """
    z = complex(z)
    if z.imag == 0:
        raise ValueError("Im z must be nonzero (boundary values only as limits)")
    if qmax < 1 or window < 2:
        raise ValueError("need qmax >= 1 and window >= 2")
    tab = farey_table(qmax)
    nc = math.floor(z.real)
    W = int(math.ceil(window))
    layers = np.zeros(qmax + 1, dtype=complex)
    var_layers = np.zeros(qmax + 1, dtype=complex)
    qf = tab.q.astype(float)
    pole = -tab.coef[:, 0] / PI / qf**2
    for n in range(nc - W, nc + W + 1):
        w = z - n
        terms = _cell_terms(tab, w)
        layers += _layer_sums(tab, terms)
        var_layers += _layer_sums(tab, terms - pole / (w - tab.p / qf))
    total = complex(layers.sum())
    total += _farey_far(tab.moments, z - 0.5 - nc, W)
    sgn = 1.0 if z.imag > 0 else -1.0
    c_const = _extrapolate_layers(-sgn * PI * 1j * tab.a0_layers, qmax)
    c_var = _extrapolate_layers(var_layers, qmax)
    if extrapolate:
        value = total + c_const
        tail = abs(c_var) + 1e-2 * abs(c_const)
    else:
        value = total
        tail = abs(c_const) + abs(c_var)
    return BrjunoEval(value, Method.FAREY, qmax, float(window), float(tail + 1e-13),
                      int(len(tab.q) * (2 * W + 1)),
                      {"tail_const": c_const, "tail_var": c_var})


@lru_cache(maxsize=None)
def _totients(n: int) -> np.ndarray:
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def _totient_tail(Q: int) -> float:
    """sum_{q > Q} phi(q)/q^3."""
    N = 64 * Q
    ph = _totients(N)
    q = np.arange(Q + 1, N + 1, dtype=float)
    return float(np.sum(ph[Q + 1:] / q**3) + 6.0 / PI**2 / N)


def _extrapolate_layers(layers: np.ndarray, qmax: int) -> complex:
    """sum_{q > qmax} of layers modelled as kappa phi(q)/q^3, kappa fitted on (qmax/2, qmax]."""
    if qmax < 8:
        return 0j
    lo = qmax // 2
    ph = _totients(qmax)
    q = np.arange(lo + 1, qmax + 1, dtype=float)
    kappa = layers[lo + 1:qmax + 1].sum() / np.sum(ph[lo + 1:qmax + 1] / q**3)
    return complex(kappa * _totient_tail(qmax))


# --- monoid route ------------------------------------------------------------------

MONOID_FLOOR = 1e-10


@lru_cache(maxsize=8)
def _monoid_parts(depth: int, m_max: int):
    p1 = phi1_function()
    psi = t_apply(p1, m_max)
    S = sum_over_monoid(psi, depth, m_max)
    return p1, S


def brjuno_monoid(z, depth: int = 40, m_max: int = 2000, n_max: int = 8) -> BrjunoEval:
    """periodized phi1 + periodized monoid sum of T phi1."""
    z = complex(z)
    if z.imag == 0:
        raise ValueError("Im z must be nonzero (boundary values only as limits)")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    p1, S = _monoid_parts(depth, m_max)
    v1, t1 = periodize(p1, z, n_max)
    v2, t2 = periodize(S, z, n_max)
    # floor: rounding in the Faber fit and the near-cut recursion
    tail = t1 + t2 + S.tail + MONOID_FLOOR
    return BrjunoEval(v1 + v2, Method.MONOID, depth, float(n_max), float(tail),
                      depth * m_max, {"m_max": m_max})


def brjuno(z, method: str = "monoid", **kw) -> BrjunoEval:
    if Method(method) is Method.FAREY:
        return brjuno_farey(z, **kw)
    return brjuno_monoid(z, **kw)


# --- jumps -------------------------------------------------------------------------

@dataclass
class JumpReport:
    rational: Rational
    delta: float
    jump_estimate: float
    theta_slope: float
    meta: Dict = field(default_factory=dict)


def measure_jump(r: Rational, delta: float = 1e-3, eta_list: Optional[Sequence[float]] = None,
                 qmax: int = 1000, method: str = "farey") -> JumpReport:
    """Jump of Re B across r, seen at height delta.

    D(eta) = Re B(r - eta + i delta) - Re B(r + eta + i delta) is fitted by
    J (2/pi) atan(eta/delta) + b eta + c eta log(eta): the first part is the
    angular profile of a jump of size J at r, the others the local drift
    (odd in eta, with the x log|x| behaviour seen next to a rational). theta_slope is the
    slope of Re B(r + rho e^{i(pi/2 - theta)}) in theta, rho = 2 delta.
    """
    if not 0 < delta <= 0.05:
        raise ValueError("delta must lie in (0, 0.05]")
    x = float(r)
    etas = np.asarray(eta_list if eta_list is not None else delta * np.array([1, 2, 4, 8, 16, 32]), float)

    def reB(w):
        if method == "farey":
            return brjuno_farey(w, qmax=qmax).value.real
        return brjuno_monoid(w).value.real

    D = np.array([reB(complex(x - e, delta)) - reB(complex(x + e, delta)) for e in etas])
    A = np.column_stack([(2 / PI) * np.arctan(etas / delta), etas, etas * np.log(etas)])
    (J, b, c), *_ = np.linalg.lstsq(A, D, rcond=None)
    rho = 2 * delta
    thetas = np.linspace(-PI / 3, PI / 3, 7)
    vals = np.array([reB(x + rho * complex(math.sin(t), math.cos(t))) for t in thetas])
    slope = float(np.polyfit(thetas, vals, 1)[0])
    return JumpReport(r, delta, float(J), slope, {"etas": etas.tolist(), "differences": D.tolist(),
                                                  "drift": float(b)})


# --- cells ----------------------------------------------------------------------------

def theorem510_decompose(z0, method: str = "monoid", **kw):
    """(B_finite(p_k/q_k), principal, remainder, bound) for the cell containing z0.

    principal = (p_{k-1} - q_{k-1} Re z0) Im phi1(z_k + 1) and
    bound = |z_k| log(1 + 1/|z_k|) / q_k, with z0 first translated into [0, 1).
    """
    z0 = complex(z0)
    n, word, zk, pkm1, pk, qkm1, qk = cell_data(z0)
    w = z0 - n
    bf = brjuno_finite(Fraction(pk, qk)) if pk != 0 else 0.0
    principal = (pkm1 - qkm1 * w.real) * phi1(zk + 1).imag
    ev = brjuno(w, method, **kw)
    remainder = ev.value.imag - bf - principal
    bound = abs(zk) * math.log1p(1.0 / abs(zk)) / qk
    return bf, float(principal), float(remainder), float(bound), {
        "n": n, "word": list(word), "z_k": zk, "tail": ev.tail_estimate}


# --- boundary paths -------------------------------------------------------------------

class PathKind(enum.Enum):
    W_H = "W_H"
    W_TILDE_H = "W_tilde_h"
    VERTICAL = "vertical"


@dataclass
class BoundaryPath:
    kind: PathKind
    parameter: float
    heights: List[float]

    def __post_init__(self):
        h = list(self.heights)
        if any(b >= a for a, b in zip(h, h[1:])) or any(v <= 0 for v in h):
            raise ValueError("heights must be positive and strictly decreasing")
        if self.kind is not PathKind.VERTICAL and self.parameter <= 0:
            raise ValueError("path parameter must be positive")

    def points(self) -> List[complex]:
        out = []
        for y in self.heights:
            if self.kind is PathKind.VERTICAL:
                x = 0.0
            elif self.kind is PathKind.W_H:
                x = y ** (1.0 / self.parameter)  # Im w = |Re w|^H
            else:
                x = math.log(1.0 / y) ** (-1.0 / self.parameter)  # Im w = exp(-|Re w|^-h)
            out.append(complex(x, y))
        return out


QUADRATIC_LIMITS = {
    "golden": math.log(1.0 / GOLDEN) / GOLDEN**2,
    "sqrt2m1": math.log(1.0 + math.sqrt(2.0)) / (2.0 - math.sqrt(2.0)),
}


def reference_brjuno(alpha) -> float:
    """B(alpha): closed form for the golden and sqrt2 - 1 fixed points, else depth 40."""
    if isinstance(alpha, str):
        return QUADRATIC_LIMITS[alpha]
    if isinstance(alpha, CFDigits):
        return brjuno_real(alpha, max_terms=60)[0]
    for name, digits in (("golden", (1,)), ("sqrt2m1", (2,))):
        if abs(float(alpha) - float(CFDigits(0, (), digits))) < 1e-15:
            return QUADRATIC_LIMITS[name]
    return brjuno_real(float(alpha), max_terms=40)[0]


def _alpha_value(alpha) -> float:
    if isinstance(alpha, str):
        return float(CFDigits(0, (), {"golden": (1,), "sqrt2m1": (2,)}[alpha]))
    return float(alpha)


def boundary_limit_experiment(alpha, path: BoundaryPath, method: str = "monoid", **kw):
    """Rows (w, Im B(alpha + w), |Im B(alpha + w) - B(alpha)|) along the path."""
    a = _alpha_value(alpha)
    cf = expand_cf(a, 30, tol=1e-15)
    if cf.terminated and max(cf.q) <= 10**4:
        raise ValueError("alpha is rational: use theorem510_decompose")
    ref = reference_brjuno(alpha)
    rows = []
    for w in path.points():
        v = brjuno(a + w, method, **kw).value.imag
        rows.append((w, v, abs(v - ref)))
    return rows


def monotone_inversions(errors: Sequence[float]) -> int:
    """Number of increases along a sequence meant to decrease."""
    return sum(1 for a, b in zip(errors, errors[1:]) if b > a)


def _in_H(w: complex) -> bool:
    from .cf_complex import in_D_interior, in_Delta
    return in_Delta(w) and not in_D_interior(w) and w.imag != 0


def random_cells(n: int, kmax: int = 6, qmax: int = 200, seed: int = 0):
    """n points z0 in [0,1) + i(0, 1/2], each in a cell H(m_1..m_k) with k <= kmax, q_k <= qmax.

    The word and a point w of H are drawn at random and w is pulled back by
    z_{i-1} = 1/(m_i + z_i); the word is then re-derived from z0 to make sure
    the point really lies in that cell.
    """
    from .cf_complex import locate_H_cell
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        k = int(rng.integers(0, kmax + 1))
        word, q_prev, q_cur = [], 0, 1
        for _ in range(k):
            m = int(rng.integers(1, 8))
            word.append(m)
            q_prev, q_cur = q_cur, m * q_cur + q_prev
        if q_cur > qmax:
            continue
        sgn = -1.0 if k % 2 else 1.0
        w = complex(rng.uniform(-0.15, 1.0), sgn * rng.uniform(1e-3, 0.5))
        if not _in_H(w):
            continue
        z = w
        for m in reversed(word):
            z = 1.0 / (m + z)
        if not 0 < z.imag <= 0.5:
            continue
        try:
            nn, found = locate_H_cell(z)
        except (ValueError, RuntimeError):
            continue
        if nn != 0 or found != word:
            continue
        out.append(z)
    return out
