import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brjuno.cf_complex import in_D
from brjuno.dilog import LOG2, PI, phi0, phi0_deriv, phi0_deriv2
from brjuno.mobius import IDENTITY, Mat2Z, MonoidWord, gen
from brjuno.operators import (HoloFunction, RealGridFn, cauchy_derivative, dinf_sample,
                              faber_from_function, grid_norm, laurent_moments, lg_apply, lgk_apply,
                              monoid_term_ratios, periodize, phi0_function, phi1_function,
                              spectral_radius_estimate, sum_over_monoid, t_apply, t_apply_grouped,
                              t_even_real_apply, t_real_apply, zero_function)

PROBES = np.array([2 + 2j, -1 + 1j, -0.5 + 0.3j, 1.5 - 0.8j, -3 - 1j, 0.5 + 1.2j, 3 + 0.1j, -10 + 4j,
                   0.2 - 2j, 1.2 + 0.4j, -0.3 - 0.6j, 5 + 5j, -2 + 0.05j, 0.9 + 0.7j, 4 - 3j,
                   -0.1 + 0.9j, 2.5 + 0.6j, -6 - 6j, 0.6 - 0.5j, 1 + 3j])

words = st.lists(st.integers(1, 6), min_size=1, max_size=4).map(lambda l: MonoidWord(tuple(l)).matrix())


def brute_t(phi, z, m_max):
    """Oracle: the defining sum of T, term by term with the algebraic form."""
    total = 0j
    for m in range(1, m_max + 1):
        total += -z * (phi(1 / z - m) - phi(-m)) + phi.deriv(-m)
    return total


def far_from(g, phi, z, margin=0.05):
    w = (g.d * z - g.b) / (g.a - g.c * z)
    lo, hi = phi.cut
    return abs(g.a - g.c * z) > margin and (abs(w.imag) > margin or w.real < lo - margin or w.real > hi + margin)


def test_lgk_identity():
    f = phi0_function()
    assert np.allclose(lgk_apply(IDENTITY, 2, f)(PROBES), f(PROBES), rtol=0, atol=0)


@given(words, words, st.integers(-2, 3))
def test_lgk_action_law(g, h, k):
    # L_g L_h = L_{gh}: the argument is g^-1 z
    f = phi0_function()
    left = lgk_apply(g, k, lgk_apply(h, k, f))
    right = lgk_apply(g @ h, k, f)
    for z in PROBES:
        if not (far_from(g @ h, f, z) and far_from(g, f, z)):
            continue
        a, b = left(z), right(z)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_lgk_translation_independent_of_k():
    f = phi0_function()
    T = Mat2Z(1, 1, 0, 1)
    for k in (-1, 1, 3):
        assert np.allclose(lgk_apply(T, k, f)(PROBES), f(PROBES - 1), atol=1e-15)


@pytest.mark.parametrize("g", [gen(1), gen(3), MonoidWord((2, 1)).matrix(), Mat2Z(1, 1, 0, 1)])
def test_second_derivative_intertwines(g):
    f = phi0_function()
    a = lgk_apply(g, -1, f)
    b = lgk_apply(g, 3, HoloFunction(lambda z, s: phi0_deriv2(z), (0, 1)))
    for z in (2 + 2j, -1 + 1j, 0.5 + 1.5j):
        d2 = cauchy_derivative(a, np.array([z]), 2, radius=0.05)[0]
        assert abs(d2 - b(z)) <= 1e-8 * max(1, abs(b(z)))


def test_cauchy_derivative_oracle():
    rng = np.random.default_rng(2)
    f = phi0_function()
    zs = []
    while len(zs) < 50:
        z = complex(rng.uniform(-3, 4), rng.uniform(-3, 3))
        if f.cut[0] - 0.2 > z.real or z.real > f.cut[1] + 0.2 or abs(z.imag) >= 0.2:
            zs.append(z)
    zs = np.array(zs)
    plain = HoloFunction(f.func, f.cut)
    assert np.abs(plain.deriv(zs, 1) - phi0_deriv(zs)).max() <= 1e-10
    assert np.abs(plain.deriv(zs, 2) - phi0_deriv2(zs)).max() <= 1e-8


def test_lg_second_derivative():
    f = phi0_function()
    for g in (gen(2), MonoidWord((1, 3)).matrix(), MonoidWord((4, 1, 2)).matrix()):
        Lg = lg_apply(g, f)
        b = lgk_apply(g, 3, HoloFunction(lambda z, s: phi0_deriv2(z), (0, 1)))
        for z in (2 + 2j, -1 + 1j, 1.5 - 1j):
            d2 = cauchy_derivative(Lg, np.array([z]), 2, radius=0.05)[0]
            assert abs(d2 - b(z)) <= 1e-8 * max(1, abs(b(z)))


def test_lg_generator_matches_closed_step():
    f = phi0_function()
    z, m = -1 + 1j, 3
    ref = -z * (phi0(1 / z - m) - phi0(-m)) + phi0_deriv(-m)
    assert abs(lg_apply(gen(m), f)(z) - ref) <= 1e-12


def test_lg_integral_and_algebraic_forms_agree():
    f = phi0_function()
    g = MonoidWord((3, 2)).matrix()
    a, b, c, d = g.tuple()
    eps = g.det
    for z in (2 + 2j, -5 + 0.5j, 0.3 + 2j):
        w = (d * z - b) / (a - c * z)
        alg = (a - c * z) * (phi0(w) - phi0(-d / c)) - eps / c * phi0_deriv(-d / c)
        assert abs(lg_apply(g, f)(z) - alg) <= 1e-11 * max(1, abs(alg))


def test_lg_vanishes_at_infinity():
    f = phi0_function()
    Lg = lg_apply(MonoidWord((2, 3)).matrix(), f)
    vals = [abs(-10.0**j * Lg(complex(-10.0**j, 0))) for j in range(1, 7)]
    assert max(vals) < 10 * min(vals) + 1


@given(words, words)
@settings(max_examples=25)
def test_lg_action_law(g, h):
    f = phi0_function()
    left = lg_apply(g, lg_apply(h, f))
    right = lg_apply(g @ h, f)
    for z in PROBES[:8]:
        a, b = left(z), right(z)
        assert abs(a - b) <= 1e-8 * max(1.0, abs(b))


def test_conjugation_equivariance():
    f = phi0_function()
    ops = [lambda p: lgk_apply(gen(2), 2, p), lambda p: lg_apply(MonoidWord((1, 2)).matrix(), p),
           lambda p: t_apply(p, 200)]
    for op in ops:
        F = op(f)
        for z in PROBES[:6]:
            assert abs(F(z.conjugate()) - F(z).conjugate()) <= 1e-10 * max(1, abs(F(z)))
    S = sum_over_monoid(f, 15, 500)
    for z in PROBES[:6]:
        assert abs(S(z.conjugate()) - S(z).conjugate()) <= 1e-10 * max(1, abs(S(z)))


def test_t_of_zero():
    T0 = t_apply(zero_function(), 50)
    assert np.all(T0(PROBES) == 0)


def test_t_matches_brute_force_and_tail():
    f = phi0_function()
    z = 2 + 2j
    t200, t400 = t_apply(f, 200), t_apply(f, 400)
    assert abs(t200(z) - t400(z)) <= t200.tail(z)
    # the m^-3 tail correction makes both far closer than the raw partial sums
    raw = brute_t(f, z, 200)
    assert abs(raw - brute_t(f, z, 400)) > abs(t200(z) - t400(z))
    ref = brute_t(f, z, 20000)  # itself short by about 1.4e-9
    for m_max in (30, 200, 2000):
        t = t_apply(f, m_max)
        assert abs(t(z) - ref) <= t.tail(z) + 2e-9


def test_grouped_form_agrees():
    f = phi0_function()
    for z0 in (0.6 + 0.05j, 0.4 + 0.02j, 0.7 - 0.1j, 0.27 + 0.01j):
        assert in_D(z0)
        direct = t_apply(f, 400)(z0)
        assert abs(t_apply_grouped(f, z0, 400) - direct) <= 1e-8


def test_monoid_sum_zero_and_inverse():
    Z = sum_over_monoid(zero_function(), 5, 200)
    assert np.all(np.abs(Z(PROBES)) == 0)
    f = phi0_function()
    S = sum_over_monoid(f, 25, 2000)
    z = 2 + 2j
    resid = S(z) - t_apply(S, 2000)(z) - f(z)
    assert abs(resid) <= 1e-6
    # and the other order: sum_M (1 - T) phi = phi
    g = f - t_apply(f, 2000)
    S2 = sum_over_monoid(faber_from_function(g), 25, 2000)
    assert abs(S2(z) - f(z)) <= 1e-6


def test_monoid_sum_residual_shrinks_with_depth():
    f = phi0_function()
    z = 1 + 1j
    res = []
    for depth in (4, 8, 16):
        S = sum_over_monoid(f, depth, 2000)
        res.append(abs(S(z) - t_apply(S, 2000)(z) - f(z)))
    assert res[0] > res[1] > res[2]


def test_monoid_term_ratios_settle():
    ratios = monoid_term_ratios(phi0_function(), depth=20, sample=dinf_sample(100))
    assert all(r < 0.65 for r in ratios[8:])


def test_periodize_log_term_constant():
    logf = HoloFunction(lambda z, s: np.log(z / (z - 1)), (0, 1))
    for z in (0.3 + 0.5j, -4.2 + 1.3j, 7 + 0.01j):
        v, _ = periodize(logf, z, 8)
        assert abs(v - (-PI * 1j)) <= 1e-9
    v, _ = periodize(logf, 0.3 - 0.5j, 8)
    assert abs(v - PI * 1j) <= 1e-9


def test_periodize_order_two_function():
    # sum_n (w - n)^-2 = pi^2 / sin^2(pi w)
    import mpmath
    f = HoloFunction(lambda z, s: 1 / (z - 0.5) ** 2, (0.4, 0.6))
    z = 0.2 + 0.7j
    ref = complex(mpmath.pi ** 2 / mpmath.sin(mpmath.pi * (z - 0.5)) ** 2)
    v, tail = periodize(f, z, 8)
    assert abs(v - ref) <= 1e-9
    v2, _ = periodize(f, z, 16)
    assert abs(v - v2) <= max(tail, 1e-12)


def test_periodize_periodic_and_modes():
    f = phi0_function()
    for z in (0.3 + 0.4j, -1.7 + 0.05j):
        a, _ = periodize(f, z, 8)
        b, _ = periodize(f, z + 1, 8)
        assert abs(a - b) <= 1e-9
        # the cruder modes land within their own tail estimates
        for mode, n in (("fit", 8), ("fit", 400), ("symmetric", 400)):
            c, tail = periodize(f, z, n, mode=mode)
            assert abs(a - c) <= tail
    with pytest.raises(ValueError):
        periodize(f, 0.3, 8)


def test_phi1_periodized_three_ways_agree():
    f = phi1_function()
    z = 0.1 + 0.3j
    a, _ = periodize(f, z, 8)
    b, _ = periodize(f, z, 30)
    assert abs(a - b) <= 1e-10


# --- real grid operators -------------------------------------------------------------

def test_t_real_examples():
    one = RealGridFn.from_callable(lambda x: np.ones_like(x), 2001)
    Tf = t_real_apply(one)
    assert np.allclose(Tf.values[1:], one.x[1:], atol=1e-15)
    ident = RealGridFn.from_callable(lambda x: x, 2001)
    Ti = t_real_apply(ident)
    assert abs(Ti(0.4) - 0.2) < 1e-12
    assert abs(Tf.values[-1] - 1.0) < 1e-15


def test_t_even_examples():
    z = RealGridFn(np.zeros(101), 0.5)
    assert np.all(t_even_real_apply(z).values == 0)
    one = RealGridFn(np.ones(1001), 0.5)
    out = t_even_real_apply(one)
    assert abs(out(0.3) - 0.3) < 1e-12
    assert out.length == 0.5


def test_t_even_brute_force():
    f = RealGridFn.from_callable(lambda x: np.cos(7 * x) + x, 4001, 0.5)
    out = t_even_real_apply(f)
    for x in (0.05, 0.11, 0.2, 0.31, 0.44, 0.499):
        y = 1 / x
        ref = sum(x * f(y - m) for m in range(2, 40) if 0 <= y - m <= 0.5)
        ref += sum(x * f(m - y) for m in range(3, 40) if 0 <= m - y <= 0.5)
        assert abs(out(x) - ref) < 1e-3


def test_spectral_radius_basics():
    zero = RealGridFn(np.zeros(100))
    assert spectral_radius_estimate(zero, 12) == 0.0
    one = RealGridFn.from_callable(lambda x: np.ones_like(x), 20001)
    ests = [spectral_radius_estimate(one, k) for k in (8, 10, 12)]
    assert all(b <= a * 1.05 for a, b in zip(ests, ests[1:]))
    assert all(e < (math.sqrt(5) - 1) / 2 for e in ests)
    w = spectral_radius_estimate(one, 12, "weighted")
    assert 0.3 < w < 0.62
    with pytest.raises(ValueError):
        spectral_radius_estimate(one, 1)


def test_grid_norms():
    one = RealGridFn.from_callable(lambda x: np.ones_like(x), 4001)
    assert abs(grid_norm(one) - 1) < 1e-12
    # weighted: int_0^1 dx / (2 sqrt(x(1-x))) = pi/2 in the theta variable
    assert abs(grid_norm(one, "weighted") - math.sqrt(PI / 2)) < 1e-3


def test_t_point_window_matches_long_direct_sum():
    # |1/z| > m_max takes the windowed route; a long direct sum is the oracle
    from brjuno.operators import _t_point, phi1_function
    p1 = phi1_function()
    z = 1 / (120.3 + 0.7j)
    windowed, _ = _t_point(p1, z, 100)
    direct, tail = _t_point(p1, z, 20000)
    assert abs(windowed - direct) <= 2 * tail + 1e-12
