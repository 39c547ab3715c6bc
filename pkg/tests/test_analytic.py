import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from photondelay import analytic as A
from photondelay.checks import laplace_c3_residual
from photondelay.ode import IntegratorSettings, evolve
from photondelay.params import SystemConfig, coupling_matrix

rate = st.floats(0.5, 2000.0)
detuning = st.floats(-300.0, 300.0)


def _generic(g1, g2, g3, d):
    # keep away from the removable singularities so the displayed forms are well conditioned
    scale = max(g1, g2, g3)
    return (abs(g1 - g2 + 2j * d) > 1e-2 * scale and abs(g1 - g3) > 1e-2 * scale
            and abs(g3 - g2 + 2j * d) > 1e-2 * scale)


@settings(max_examples=80, deadline=None)
@given(rate, rate, rate, detuning)
def test_amplitudes_match_term_by_term_forms(g1, g2, g3, d):
    if not _generic(g1, g2, g3, d):
        return
    cfg = SystemConfig(gamma1=g1, gamma2=g2, gamma3=g3, delta=d)
    t = np.linspace(0, 0.74, 75)
    t3 = np.linspace(0, 0.99, 100)
    tol = dict(rtol=1e-8, atol=1e-12)
    assert np.allclose(A.c1(cfg, t), oracles.c1(g1, g2, d, t), **tol)
    assert np.allclose(A.c2(cfg, t), oracles.c2(g1, g2, d, t), **tol)
    assert np.allclose(A.c3(cfg, t3), oracles.c3(g1, g2, g3, d, t3), **tol)
    assert np.allclose(A.c3_free(cfg, t3), oracles.c3_free(g1, g3, t3), **tol)
    assert np.allclose(A.c3_scatter(cfg, t3), oracles.c3_scatter(g1, g2, g3, d, t3), **tol)


def test_b_m_matches_term_by_term_form():
    cfg = SystemConfig(delta=1.56 * 64)
    g = coupling_matrix(cfg)
    t = np.linspace(0, 0.49, 50)
    for m in (-2048, -7, -1, 0, 1, 2, 3, 100, 2048):
        col = m + cfg.mode_half_width
        ref = oracles.b_m(4, 64, cfg.delta, g[0, col], g[1, col], m, t)
        assert np.allclose(A.b_m(cfg, m, t), ref, rtol=1e-10, atol=1e-15)


def test_b_modes_consistent_with_single_mode():
    cfg = SystemConfig(mode_half_width=16)
    t = np.array([0.1, 0.3, 0.45])
    full = A.b_modes(cfg, t)
    for m in (-16, -3, 0, 5):
        assert np.allclose(full[:, m + 16], A.b_m(cfg, m, t))


def test_exact_causality():
    cfg = SystemConfig(delta=7.0)
    assert np.all(A.c2(cfg, np.linspace(0, 0.25, 1001)) == 0)
    early = np.linspace(0, 0.5, 1001)
    for fn in (A.c3, A.c3_free, A.c3_scatter):
        assert np.all(fn(cfg, early) == 0)
    assert abs(A.c2(cfg, 0.25 + 1e-9)) < 1e-6 and abs(A.c3(cfg, 0.5 + 1e-9)) < 1e-6


def test_c1_free_decay_before_reflection():
    cfg = SystemConfig()
    t = np.linspace(0, 0.5, 101)
    assert np.allclose(A.c1(cfg, t), np.exp(-2.0 * t), rtol=4e-16, atol=0)


def test_c1_reexcitation_without_scatterer():
    cfg = SystemConfig(gamma2=0, delta=0)
    t = np.linspace(0.5, 0.74, 25)
    tau = t - 0.5
    expected = np.exp(-2 * t) + 2 * tau * np.exp(-2 * tau)
    assert np.allclose(A.c1(cfg, t), expected, rtol=1e-12)


def test_c1_kink_at_reflection():
    cfg = SystemConfig(delta=5.0)
    h = 1e-7
    left = (A.c1(cfg, 0.5) - A.c1(cfg, 0.5 - h)) / h
    right = (A.c1(cfg, 0.5 + h) - A.c1(cfg, 0.5)) / h
    assert abs(A.c1(cfg, 0.5 + 1e-12) - A.c1(cfg, 0.5)) < 1e-10
    assert abs(right - left) > 1.0


def test_no_scatterer_means_no_scattering_part():
    cfg = SystemConfig(gamma2=0)
    t = np.linspace(0, 0.99, 50)
    assert np.all(A.c3_scatter(cfg, t) == 0)
    assert np.allclose(A.c3(cfg, t), A.c3_free(cfg, t), rtol=1e-12, atol=0)
    assert np.all(A.c2(cfg, t[t < 0.75]) == 0)


def test_decomposition_identity_random_points():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        g1, g2, g3 = rng.uniform(0.5, 500, 3)
        cfg = SystemConfig(gamma1=g1, gamma2=g2, gamma3=g3, delta=rng.uniform(-200, 200))
        t = rng.uniform(0.5, 1.0)
        total = A.c3(cfg, t)
        worst = max(worst, abs(A.c3_free(cfg, t) + A.c3_scatter(cfg, t) - total))
    assert worst <= 1e-12


@pytest.mark.parametrize("params", [
    dict(gamma1=16, gamma2=16, delta=0.0),         # g1 - g2 + 2i d = 0
    dict(gamma1=64, gamma3=64),                    # g1 = g3
    dict(gamma2=1024, gamma3=1024, delta=0.0),     # g3 - g2 + 2i d = 0
    dict(gamma1=64, gamma2=64, gamma3=64, delta=0.0),
])
def test_confluent_limits_are_continuous(params):
    cfg = SystemConfig(**params)
    nudged = cfg.replace(gamma1=cfg.gamma1 * (1 + 1e-5), gamma3=cfg.gamma3 * (1 - 1.3e-5))
    t = np.linspace(0.5, 0.74, 25)
    for fn in (A.c1, A.c2, A.c3):
        a, b = fn(cfg, t), fn(nudged, t)
        assert np.all(np.isfinite(a))
        assert np.max(np.abs(a - b)) <= 1e-3 * max(np.max(np.abs(a)), 1e-3)


def test_c2_confluent_value():
    cfg = SystemConfig(gamma1=4, gamma2=4, delta=0.0)
    t = np.linspace(0.25, 0.74, 30)
    tau = t - 0.25
    assert np.allclose(A.c2(cfg, t), -4 * tau / 2 * np.exp(-2 * tau), rtol=1e-12, atol=1e-15)


@pytest.mark.slow
def test_c2_confluent_against_ode():
    cfg = SystemConfig(gamma1=4, gamma2=4, delta=1e-6)
    t = np.linspace(0, 0.7, 141)
    tr = evolve(cfg, IntegratorSettings(t_end=0.7), t)
    assert np.max(np.abs(tr.c[1] - A.c2(cfg, t))) <= 1e-2


def test_rapid_detector_limit():
    # g3 >> g2: c3 -> -sqrt(g1/g3) {e1 - i g2/[2d - i(g1-g2)] (e1 - e2)}
    g1, g2, d = 1.0, 16.0, 5.0
    cfg = SystemConfig(gamma1=g1, gamma2=g2, gamma3=1e4 * g2, delta=d)
    t = np.linspace(0.5, 0.99, 50)[5:]
    tau = t - 0.5
    e1, e2 = np.exp(-g1 * tau / 2), np.exp(-(g2 / 2 - 1j * d) * tau)
    limit = -math.sqrt(g1 / cfg.gamma3) * (e1 - 1j * g2 / (2 * d - 1j * (g1 - g2)) * (e1 - e2))
    assert np.max(np.abs(A.c3(cfg, t) - limit)) <= 1e-2 * np.max(np.abs(limit))


def test_c3_scales_with_root_gamma3_for_slow_detector():
    base = SystemConfig(gamma1=64, gamma2=16, gamma3=1e-3, delta=3.0)
    t = np.array([0.6, 0.8, 0.95])
    r1 = A.c3(base, t) / math.sqrt(base.gamma3)
    r2 = A.c3(base.replace(gamma3=base.gamma3 / 4), t) / math.sqrt(base.gamma3 / 4)
    assert np.allclose(r1, r2, rtol=1e-3)


def test_validity_windows():
    cfg = SystemConfig()
    for fn, t in ((A.c1, 0.75), (A.c2, 0.8), (A.c3, 1.0), (A.c3_free, 1.2)):
        with pytest.raises(A.TruncationWindowError):
            fn(cfg, t)
        fn(cfg, t, allow_truncated=True)
    with pytest.raises(A.TruncationWindowError):
        A.b_m(cfg, 1, 0.5)
    with pytest.raises(ValueError):
        A.b_m(cfg, cfg.mode_half_width + 1, 0.1)


def test_closed_forms_need_default_positions():
    with pytest.raises(ValueError, match="z = 1/4"):
        A.c1(SystemConfig(z1=0.2), 0.1)


def test_b_m_vanishes_at_zero_and_reduces_without_scatterer():
    cfg = SystemConfig(gamma2=0, mode_half_width=8)
    g = coupling_matrix(cfg)
    t = np.linspace(0, 0.49, 20)
    for m in range(-8, 9):
        assert A.b_m(cfg, m, 0.0) == 0
        w = m * math.pi
        free = 2j * g[0, m + 8] / (4 - 2j * w) * (np.exp(-2 * t) - np.exp(-1j * w * t))
        assert np.allclose(A.b_m(cfg, m, t), free, atol=1e-15)


def test_parity_sign_flips_scattering_terms():
    even, odd = SystemConfig(), SystemConfig(m0=1_000_004)
    t = np.linspace(0.3, 0.7, 9)
    assert np.allclose(A.c2(odd, t), -A.c2(even, t))
    assert np.allclose(A.c3(odd, np.linspace(0.5, 0.9, 9)), A.c3(even, np.linspace(0.5, 0.9, 9)))


@pytest.mark.slow
def test_parity_sign_against_ode():
    cfg = SystemConfig(m0=1_000_004, mode_half_width=1024)
    t = np.linspace(0, 0.7, 71)
    tr = evolve(cfg, IntegratorSettings(t_end=0.7), t)
    assert np.max(np.abs(tr.c - A.analytic_trace(cfg, t).c)) <= 2e-2


def test_truncated_unitarity_fig3(fig3_cfg):
    tr = A.analytic_trace(fig3_cfg, [0.4], with_modes=True)
    assert abs(tr.norm2[0] - 1) <= 1e-2


def test_oracle_agreement_fig3(fig3_cfg, fig3_ode):
    sel = fig3_ode.times <= 0.7
    ref = A.analytic_trace(fig3_cfg, fig3_ode.times[sel])
    for j in range(3):
        assert np.max(np.abs(ref.c[j] - fig3_ode.c[j, sel])) <= 1e-2
    i = np.argmin(np.abs(fig3_ode.times - 0.3))
    assert abs(A.c2(fig3_cfg, 0.3) - fig3_ode.c[1, i]) <= 1e-2


def test_modes_against_ode(fig3_cfg, fig3_ode):
    i = np.argmin(np.abs(fig3_ode.times - 0.4))
    b = A.b_modes(fig3_cfg, fig3_ode.times[i])[0]
    assert np.linalg.norm(b - fig3_ode.b[i]) <= 2e-2


# -- Laplace-domain machinery -------------------------------------------------


def test_f11_closed_form_at_large_M():
    cfg = SystemConfig(mode_half_width=4096)
    for s in (1.0, 4.0, 4 + 4j):
        direct, closed = A.f11_sum_check(cfg, s)
        assert abs(direct - closed) <= 1e-3 * abs(closed)
        assert closed == pytest.approx(oracles.f11_hyperbolic(4.0, s), rel=1e-13)


def test_f11_asymptotics_and_symmetry():
    cfg = SystemConfig(mode_half_width=4096)
    big = A.f11_closed(cfg, 400.0)
    assert big == pytest.approx(-2j * 4 / (4 * math.pi), rel=1e-12)
    assert np.isfinite(A.f11_closed(cfg, 1e5))
    s = 3 + 2j
    assert A.f11_direct(cfg, s.conjugate()) == pytest.approx(-A.f11_direct(cfg, s).conjugate(), rel=1e-12)
    with pytest.raises(ValueError):
        A.f11_sum_check(cfg, -1.0)


def test_leading_transform_values():
    cfg = SystemConfig()
    assert complex(A.transforms(cfg)["c1"][0](1.0)) == pytest.approx(1 / 3)
    s = 2.0 + 1j
    g1, g2, g3, d = cfg.gamma1, cfg.gamma2, cfg.gamma3, cfg.delta
    lt = A.laplace_leading_terms(cfg, s)
    c3 = -4 * np.exp(-s / 2) * math.sqrt(g1 * g3) * (s - 1j * d) / ((2 * s + g1) * (2 * s + g3) * (2 * s + g2 - 2j * d))
    c2 = -2 * np.exp(-s / 4) * math.sqrt(g1 * g2) / ((2 * s + g1) * (2 * s + g2 - 2j * d))
    assert lt.c3 == pytest.approx(c3, rel=1e-13)
    assert lt.c2 == pytest.approx(c2, rel=1e-13)


def test_c2_transform_delay_factor():
    cfg = SystemConfig(delta=10.0)
    tf = A.transforms(cfg)["c2"][0]
    s, sp = 3.0, 5.0
    rational = lambda x: 1 / ((2 * x + 4) * (2 * x + 64 - 20j))  # noqa: E731
    ratio = complex(tf(s) / tf(sp))
    assert ratio == pytest.approx(np.exp(-(s - sp) / 4) * rational(s) / rational(sp), rel=1e-13)


def test_pole_proximity_rejected():
    cfg = SystemConfig(gamma1=4, gamma2=64, gamma3=1024, delta=0.0)
    with pytest.raises(ValueError, match="pole"):
        A.laplace_leading_terms(cfg.replace(gamma1=0.0), 1e-10)  # pole of the free decay at s = 0
    with pytest.raises(ValueError):
        A.laplace_leading_terms(SystemConfig(), 0.0)


def test_series_transforms_roundtrip():
    cfg = SystemConfig(delta=99.84)
    for name in ("c1", "c2", "c3"):
        series = A.amplitude_series(cfg, name)
        for s in (1.0, 30 + 5j):
            assert complex(series.laplace(s)) == pytest.approx(
                getattr(A.laplace_leading_terms(cfg, s), name), rel=1e-10)


def test_numerical_laplace_of_c3(fig3_cfg):
    assert laplace_c3_residual(fig3_cfg, fig3_cfg.gamma2) <= 1e-4
