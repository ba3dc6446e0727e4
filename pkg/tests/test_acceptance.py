"""Acceptance checks, one PASS/FAIL line each.

Run with `pytest -v tests/test_acceptance.py` (lines are printed live) or
as a script: `python3 tests/test_acceptance.py`.
Three criteria cannot be met by the function itself; they are marked xfail
(strict) and the reason records what was measured.
"""
import cmath
import itertools
import math
import sys
import time

import numpy as np
import pytest

from brjuno.brjuno_complex import (BoundaryPath, PathKind, boundary_limit_experiment, brjuno_farey,
                                   brjuno_monoid, measure_jump, monotone_inversions, random_cells,
                                   theorem510_decompose)
from brjuno.cf_complex import ccf_expand, in_D
from brjuno.cf_real import GOLDEN, GOLDEN_INV, CFDigits, brjuno_real, expand_cf
from brjuno.dilog import LIMIT_AT_ONE, li2, phi0, phi0_deriv, phi1
from brjuno.mobius import MonoidWord, enumerate_monoid, factorize, monoid_to_rational, rational_to_word
from brjuno.operators import (RealGridFn, dinf_sample, monoid_term_ratios, phi0_function,
                              spectral_radius_estimate)
from brjuno.rational import Rational

PI = math.pi
L2 = math.log(2)


def _timed(fn):
    t = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t


def _rand_points(n, seed, rmin, rmax):
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(rmin), math.log(rmax), n))
    return r * np.exp(1j * rng.uniform(-PI, PI, n))


def _rand_digits(rng, qmax=20):
    pre = tuple(int(v) for v in rng.integers(1, qmax + 1, rng.integers(0, 9)))
    per = tuple(int(v) for v in rng.integers(1, qmax + 1, rng.integers(1, 5)))
    return CFDigits(0, pre, per)


def c1_dilog():
    special = [
        abs(li2(1) - PI**2 / 6),
        abs(li2(-1) + PI**2 / 12),
        abs(li2(0.5) - (PI**2 / 12 - L2**2 / 2)),
        abs(li2(2, "above") - complex(PI**2 / 4, PI * L2)),
        abs(li2(2, "below") - complex(PI**2 / 4, -PI * L2)),
    ]
    z = _rand_points(1000, 7, 0.1, 10.0)
    inv = np.abs(li2(z) + li2(1 / z) + PI**2 / 6 + 0.5 * np.log(-z) ** 2).max()
    refl = np.abs(li2(z) + li2(1 - z) - PI**2 / 6 + np.log(z) * np.log(1 - z)).max()
    ok = max(special) <= 1e-12 and max(inv, refl) <= 1e-10
    return ok, f"special max err {max(special):.1e}; inversion {inv:.1e}, reflection {refl:.1e} (1000 pts)"


def c2_phi():
    anchors = max(abs(phi0(-1) - PI / 12), abs(phi0_deriv(-1) - L2 / PI))
    z = _rand_points(100, 3, 0.05, 20.0)
    rhs = PI / 12 + L2 / PI
    ident = np.abs(phi1(z) + z * phi1(1 / z) - (1 + z) * rhs).max()
    deltas = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    errs = [abs(phi1(complex(1, d)) + 1j * cmath.log(-1j * d) - LIMIT_AT_ONE) for d in deltas]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    ok = anchors <= 1e-12 and ident <= 1e-12 and decreasing and errs[-1] <= 1e-3
    return ok, (f"anchors {anchors:.1e}; three-term identity {ident:.1e} (100 pts); limit errors "
                + ", ".join(f"{e:.1e}" for e in errs))


def c3_real_brjuno():
    b_gold = math.log(GOLDEN_INV) / GOLDEN**2
    b_silver = math.log(1 + math.sqrt(2)) / (2 - math.sqrt(2))
    eg = abs(brjuno_real(CFDigits(0, (), (1,)), max_terms=40)[0] - b_gold)
    es = abs(brjuno_real(CFDigits(0, (), (2,)), max_terms=40)[0] - b_silver)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        d = _rand_digits(rng)
        x = float(d)
        v = brjuno_real(d, max_terms=60)[0]
        w = brjuno_real(d.shift(), max_terms=60)[0]
        worst = max(worst, abs(v + math.log(x) - x * w))
    ok = eg <= 1e-9 and es <= 1e-9 and worst <= 1e-8
    return ok, f"golden err {eg:.2e}, sqrt2-1 err {es:.1e} at depth 40; functional eq {worst:.1e} (200 pts)"


def _complex_run_residual(r):
    z0, worst = r.z[0], 0.0
    for i in range(r.depth + 1):
        zi, p1, p0, q1, q0 = r.z[i], r.P(i - 1), r.P(i), r.Q(i - 1), r.Q(i)
        if zi != 0:
            worst = max(worst, abs(z0 - (p1 * zi + p0) / (q1 * zi + q0)))
        worst = max(worst, abs(r.beta[i] - (-1) ** i * (q0 * z0 - p0)) / max(1.0, q0 * abs(z0)))
        if i < r.depth:
            worst = max(worst, abs(r.beta[i] - 1 / (r.Q(i + 1) + q0 * r.z[i + 1])) / abs(r.beta[i]))
        if i >= 1:
            worst = max(worst, abs((-1) ** i * z0.imag - abs(r.beta[i - 1]) ** 2 * zi.imag) / abs(z0.imag))
    return worst


def c4_cf_suite():
    rng = np.random.default_rng(5)
    real_bad, real_worst = 0, 0.0
    for _ in range(500):
        cf = expand_cf(_rand_digits(rng, 50), 40)
        for k in range(1, len(cf.p)):
            real_bad += cf.q[k] * cf.p[k - 1] - cf.p[k] * cf.q[k - 1] != (-1) ** k
        for k in range(len(cf.beta)):
            real_worst = max(real_worst, cf.beta[k] - GOLDEN**k)
            if k + 1 < len(cf.q):
                bq = cf.beta[k] * cf.q[k + 1]
                real_worst = max(real_worst, 0.5 - bq, bq - 1)
    cx_worst, runs = 0.0, 0
    while runs < 500:
        z = complex(rng.uniform(0, 1), rng.uniform(-0.5, 0.5))
        if not in_D(z) or abs(z.imag) < 1e-9:
            continue
        cx_worst = max(cx_worst, _complex_run_residual(ccf_expand(z, 60)))
        runs += 1
    ok = real_bad == 0 and real_worst <= 1e-12 and cx_worst <= 1e-10
    return ok, (f"real: {real_bad} determinant failures, worst bound excess {real_worst:.1e} (500); "
                f"complex: worst residual {cx_worst:.1e} (500)")


def c5_monoid():
    words = 0
    for n in range(7):
        for letters in itertools.product(range(1, 5), repeat=n):
            if factorize(MonoidWord(letters).matrix()).letters != letters:
                return False, f"round trip fails at {letters}"
            words += 1
    hits = {}
    for w, _ in enumerate_monoid(40, 30):
        r = monoid_to_rational(w)
        if r.den <= 30:
            hits[r] = hits.get(r, 0) + 1
    expected = {Rational(p, q) for q in range(1, 31) for p in range(1, q + 1) if math.gcd(p, q) == 1}
    inverse_ok = all(monoid_to_rational(rational_to_word(r)) == r for r in expected)
    ok = set(hits) == expected and all(v == 1 for v in hits.values()) and inverse_ok
    return ok, f"{words} words round-trip; {len(hits)}/{len(expected)} rationals hit once each"


def c6_contraction():
    one = RealGridFn.from_callable(lambda x: np.ones_like(x), 100000)
    est = spectral_radius_estimate(one, 12, "L2")
    ratios = monoid_term_ratios(phi0_function(), depth=20, sample=dinf_sample(100))
    settled = max(ratios[8:])
    ok = 0.50 < est < 0.65 and settled < 0.65
    return ok, f"L2 estimate {est:.4f} (k=12, N=1e5); monoid term ratios settle at {settled:.4f}"


def c7_two_routes():
    rng = np.random.default_rng(2024)
    worst_ratio, worst_abs = 0.0, 0.0
    for _ in range(25):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.3, 2))
        f, m = brjuno_farey(z, qmax=300), brjuno_monoid(z)
        d = abs(f.value - m.value)
        worst_ratio = max(worst_ratio, d / (f.tail_estimate + m.tail_estimate))
        worst_abs = max(worst_abs, d)
    ok = worst_ratio <= 1 and worst_abs <= 1e-3
    return ok, f"max |farey - monoid| {worst_abs:.1e}, max diff/tails {worst_ratio:.2f} (25 probes)"


def c8_jumps():
    parts, ok = [], True
    for p, q in ((0, 1), (1, 2), (1, 3)):
        j = measure_jump(Rational(p, q), delta=1e-3, qmax=1000).jump_estimate
        rel = j / (PI / q) - 1
        ok &= abs(rel) <= 0.1
        parts.append(f"{p}/{q}: {j:.4f} ({rel:+.2%})")
    return ok, "; ".join(parts)


def c9_boundary():
    heights = [1e-1, 1e-2, 1e-3, 1e-4]
    parts, ok = [], True
    for kind, param in ((PathKind.VERTICAL, 1.0), (PathKind.W_H, 2.0)):
        for alpha in ("golden", "sqrt2m1"):
            errs = [r[2] for r in boundary_limit_experiment(alpha, BoundaryPath(kind, param, heights))]
            good = monotone_inversions(errs) <= 1 and errs[-1] <= 5e-2
            ok &= good
            parts.append(f"{kind.name.lower()} {alpha} " + "/".join(f"{e:.3f}" for e in errs))
    return ok, "; ".join(parts)


def _p95(cells, **kw):
    ratios = []
    for z in cells:
        _, _, rem, bound, _ = theorem510_decompose(z, **kw)
        ratios.append(abs(rem) / bound)
    return float(np.percentile(ratios, 95))


def c10_cells():
    cells = random_cells(100, kmax=6, qmax=200, seed=0)
    lo = _p95(cells, depth=20, m_max=1000)
    hi = _p95(cells, depth=40, m_max=2000)
    ok = math.isfinite(hi) and abs(lo / hi - 1) <= 0.2
    return ok, f"p95 |remainder|/bound {lo:.3f} (depth 20) vs {hi:.3f} (depth 40)"


CRITERIA = [
    (1, "dilogarithm values and identities", c1_dilog, 1),
    (2, "phi0/phi1 anchors, identity, limit at 1", c2_phi, 5),
    (3, "real Brjuno closed forms and functional equation", c3_real_brjuno, 5),
    (4, "continued-fraction invariants", c4_cf_suite, 10),
    (5, "monoid algebra", c5_monoid, 10),
    (6, "contraction", c6_contraction, 60),
    (7, "Farey route vs monoid route", c7_two_routes, 120),
    (8, "jumps at 0/1, 1/2, 1/3", c8_jumps, 120),
    (9, "boundary limits on vertical and W_H paths", c9_boundary, 300),
    (10, "cell remainder ratio stability", c10_cells, 300),
]

UNATTAINABLE = {
    3: "golden series at depth 40 is off by g^38 log G = 5.5e-9 > 1e-9 (depth 50 gives 4.5e-11)",
    6: "the L2 estimate tends to sqrt(0.19946) = 0.4466 < 0.50 (measured 0.4455 at k = 12)",
    9: "W_H (H=2) errors at 1e-4 are 0.11 (golden) and 0.074 (sqrt2-1); routes agree, so it is the function",
}


def evaluate(number):
    _, title, fn, limit = CRITERIA[number - 1]
    ok, detail, secs = _timed(fn)
    ok = ok and secs < limit
    line = f"{'PASS' if ok else 'FAIL'} {number:2d} {title}: {detail}; {secs:.1f} s (limit {limit} s)"
    return ok, line


def _case(n):
    if n in UNATTAINABLE:
        return pytest.param(n, marks=pytest.mark.xfail(strict=True, reason=UNATTAINABLE[n]))
    return n


@pytest.mark.parametrize("number", [_case(c[0]) for c in CRITERIA])
def test_acceptance(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(c[0]) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
