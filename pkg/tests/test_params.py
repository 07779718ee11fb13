import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridsqueeze.errors import DegenerateError, DomainError, InstabilityError
from hybridsqueeze.params import (
    CONST, TWO_PI, CantileverParams, MagnonParams, Regime, amplified_occupation,
    cantilever_frequency, cooperativity, derive_table1, dispersive_validity,
    effective_ms_params, frame_from_detunings, frame_params, kittel_zero_point_magnetization,
    magnon_mechanical_coupling, nv_frequency, regime_classify, resonance_pump, rwa_ratios,
    spin_mechanical_coupling, squeezed_bath_coefficients, squeezing_parameter,
    table1_device, thermal_occupation, zero_point_motion,
)

MHz = TWO_PI * 1e6
GHz = TWO_PI * 1e9
# CODATA 2022 values typed in by hand, independent of scipy
HBAR = 1.054571817e-34
KB = 1.380649e-23
MUB = 9.2740100657e-24


def test_constants():
    assert CONST.hbar == pytest.approx(HBAR, rel=1e-9)
    assert CONST.gamma == pytest.approx(2 * MUB / HBAR, rel=1e-9)


def test_cantilever_frequency():
    c = CantileverParams()
    assert cantilever_frequency(c) / (3.8 * MHz) == pytest.approx(1.0, abs=0.02)
    base = cantilever_frequency(c)
    assert cantilever_frequency(CantileverParams(thickness=0.04e-6)) == pytest.approx(2 * base)
    assert cantilever_frequency(CantileverParams(length=8e-6)) == pytest.approx(base / 4)
    with pytest.raises(DomainError):
        CantileverParams(length=-1.0)


def test_zero_point_motion():
    # sqrt(hbar / (2 * 2.8e-17 * 2 pi 3.8e6)) evaluated by hand
    assert zero_point_motion(2.8e-17, 3.8 * MHz) == pytest.approx(2.7955e-13, rel=1e-3)
    assert zero_point_motion(4 * 2.8e-17, 3.8 * MHz) == pytest.approx(zero_point_motion(2.8e-17, 3.8 * MHz) / 2)
    assert 0.5 < zero_point_motion(table1_device().cantilever.effective_mass, 3.8 * MHz) / 2.69e-13 < 2
    with pytest.raises(DomainError):
        zero_point_motion(0.0, 1.0)


def test_kittel_magnetization_and_volume():
    m = MagnonParams()
    assert m.volume == pytest.approx(4.19e-21, rel=1e-3)
    assert kittel_zero_point_magnetization(m.M_s, m.volume) == pytest.approx(36.1, rel=0.01)
    assert kittel_zero_point_magnetization(m.M_s, 4 * m.volume) == pytest.approx(
        kittel_zero_point_magnetization(m.M_s, m.volume) / 2)


def test_radius_warning():
    with pytest.warns(UserWarning):
        MagnonParams(radius=200e-9)


def test_coupling_formulas():
    d = table1_device()
    assert d.g == pytest.approx(0.69 * MHz)
    assert d.lam == pytest.approx(0.69 * MHz)
    assert magnon_mechanical_coupling(0.0, 1e-13, 36.1, 4.19e-21) == 0.0
    assert spin_mechanical_coupling(0.0, 1e-13) == 0.0
    # b0 x_zpf M_K V / (2 hbar) with the literal inputs
    g = magnon_mechanical_coupling(1e7, 2.69e-13, 36.1, 4.19e-21)
    assert g == pytest.approx(1e7 * 2.69e-13 * 36.1 * 4.19e-21 / (2 * HBAR), rel=1e-8)
    assert g / (0.69 * MHz) > 100
    lam = spin_mechanical_coupling(4.5e7, 2.69e-13)
    assert lam / MHz == pytest.approx(0.3388, rel=2e-3)
    assert spin_mechanical_coupling(4.56e7, 2.69e-13) / MHz == pytest.approx(0.343, rel=2e-3)


def test_nv_frequency():
    assert nv_frequency(0.068) / (0.96 * GHz) == pytest.approx(1.0, abs=0.01)
    assert nv_frequency(0.0) == pytest.approx(2.87 * GHz)
    assert nv_frequency(0.084) / GHz == pytest.approx(0.5187, abs=5e-4)
    with pytest.raises(DomainError):
        nv_frequency(0.2)


def test_thermal_occupation():
    assert thermal_occupation(3.8 * MHz, 0.01) == pytest.approx(55, abs=1)
    assert thermal_occupation(2.35 * GHz, 0.01) == pytest.approx(1.3e-5, rel=0.1)
    assert thermal_occupation(3.8 * MHz, 0.0) == 0.0
    x = HBAR * 3.8 * MHz / (KB * 0.01)
    assert thermal_occupation(3.8 * MHz, 0.01) == pytest.approx(1 / (math.exp(x) - 1), rel=1e-8)
    with pytest.raises(DomainError):
        thermal_occupation(0.0, 1.0)


def test_squeezing_parameter():
    assert squeezing_parameter(0.0, -1.0) == 0.0
    assert squeezing_parameter(math.tanh(2.0), 1.0) == pytest.approx(1.0, rel=1e-12)
    r = squeezing_parameter(2.378 * GHz, 3.8 * MHz - 2.382 * GHz)
    assert r == pytest.approx(2.5, abs=0.02)
    with pytest.raises(InstabilityError):
        squeezing_parameter(2.0, 1.0)
    with pytest.raises(InstabilityError):
        squeezing_parameter(1.0, -1.0)


def test_resonance_pump_table1():
    wp, Wp = resonance_pump(3.8 * MHz, 2.35 * GHz, 2.5)
    assert wp / (2.382 * GHz) == pytest.approx(1, abs=1e-3)
    assert Wp / (2.378 * GHz) == pytest.approx(1, abs=1e-3)
    assert squeezing_parameter(Wp, 3.8 * MHz - wp) == pytest.approx(2.5, abs=1e-9)
    with pytest.raises(DegenerateError):
        resonance_pump(3.8 * MHz, 2.35 * GHz, 0.0)


def test_resonance_pump_ucr_edge():
    fp = frame_params(table1_device(), r_p=2.42)
    assert fp.g_r / abs(fp.Delta_s) == pytest.approx(0.10, abs=0.01)


@settings(max_examples=60, deadline=None)
@given(r=st.floats(0.1, 3.0))
def test_resonance_invariants(r):
    fp = frame_params(table1_device(), r_p=r)
    assert fp.Delta_s == pytest.approx(fp.Delta_K, rel=1e-9)
    assert fp.Delta_s * math.cosh(2 * r) == pytest.approx(fp.Delta_x, rel=1e-9)
    assert squeezing_parameter(fp.Omega_p, fp.Delta_x) == pytest.approx(r, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(r=st.floats(0.0, 3.0))
def test_hyperbolic_identities(r):
    fp = frame_from_detunings(table1_device(), r, -55, -45)
    assert fp.g_r**2 - fp.g_c**2 == pytest.approx(fp.g**2, rel=1e-9)
    assert fp.lam_r**2 - fp.lam_c**2 == pytest.approx(fp.lam**2, rel=1e-9)
    assert fp.n_xs >= fp.n_x


def test_amplified_occupation():
    assert amplified_occupation(55, 2.5) == pytest.approx(55 * math.cosh(5) + math.sinh(2.5) ** 2)
    assert amplified_occupation(55, 2.5) == pytest.approx(4118, abs=1)
    assert amplified_occupation(55, 0.0) == 55
    rs = np.linspace(0, 3, 50)
    vals = [amplified_occupation(55, r) for r in rs]
    assert np.all(np.diff(vals) > 0)


def test_frame_params_examples():
    d = table1_device()
    fp = frame_params(d, r_p=2.5)
    assert fp.g_r / MHz == pytest.approx(4.23, rel=1e-3)
    fp0 = frame_params(d, omega_p=1.0 * GHz, Omega_p=0.0)
    assert fp0.r_p == 0 and fp0.g_r == fp0.g and fp0.g_c == 0 and fp0.lam_c == 0
    assert fp0.Delta_s == fp0.Delta_x and fp0.n_xs == fp0.n_x
    with pytest.raises(DomainError):
        frame_params(d)


def test_cooperativity():
    d = table1_device().with_Q(1e5)
    fp = frame_params(d, omega_p=1.0 * GHz, Omega_p=0.0)
    C = cooperativity(fp.g_r, fp.gamma_x, 1 * MHz, fp.n_x)
    # 4 g^2 / (gamma_x gamma_s (1 + n)) with g = 0.69, gamma_x = 38 Hz, gamma_s = 1 MHz (x 2 pi)
    assert C == pytest.approx(4 * 0.69e6**2 / (38.0 * 1e6 * (1 + fp.n_x)), rel=1e-9)
    assert C == pytest.approx(9.0e2, rel=0.05)
    r = 2.5
    fp = frame_params(d, r_p=r)
    Cr = cooperativity(fp.g_r, fp.gamma_x, 1 * MHz, fp.n_xs)
    Crp = cooperativity(fp.g_r, fp.gamma_x, 1 * MHz, fp.n_x)
    assert Crp / C == pytest.approx(math.cosh(r) ** 2, rel=1e-9)
    assert Crp / C == pytest.approx(37.6, abs=0.1)
    assert Cr / C == pytest.approx(0.51, abs=0.01)
    with pytest.raises(DomainError):
        cooperativity(1.0, 0.0, 1.0, 0.0)


def _crossing(f, lo, hi):
    from scipy.optimize import brentq
    return brentq(f, lo, hi, xtol=1e-10)


def scr_onset(d):
    return _crossing(lambda r: frame_params(d, r_p=r).g_r / d.gamma_s - 1, 0.1, 2.0)


def test_scr_onset_matches_arccosh():
    assert scr_onset(table1_device()) == pytest.approx(math.acosh(1 / 0.69), abs=1e-8)


def test_scr_onset_quoted_value():
    # quoted onset 0.93 +- 0.01; arccosh(1/0.69) = 0.9156 with the tabulated g and gamma_s
    assert scr_onset(table1_device()) == pytest.approx(0.93, abs=0.01)


def test_regime_thresholds():
    d = table1_device()
    ucr = _crossing(lambda r: frame_params(d, r_p=r).g_r / abs(frame_params(d, r_p=r).Delta_s) - 0.1, 1.0, 3.0)
    assert ucr == pytest.approx(2.42, abs=0.02)
    assert regime_classify(frame_params(d, r_p=0.9)).regime is Regime.WCR
    assert regime_classify(frame_params(d, r_p=1.5)).regime is Regime.SCR
    rep = regime_classify(frame_params(d, r_p=2.5))
    assert rep.regime is Regime.UCR and rep.scr


def test_regime_small_sphere():
    d = table1_device().with_radius(10e-9)
    assert d.g == pytest.approx(0.69 * MHz * 1e-1**1.5)
    assert not regime_classify(frame_params(d, r_p=2.5)).scr


def test_regime_tie_is_wcr():
    fp = frame_params(table1_device(), r_p=1.0)
    assert regime_classify(fp, gamma_s=fp.g_r).regime is Regime.WCR


def test_rwa_ratios():
    d = table1_device()
    rr = rwa_ratios(frame_params(d, r_p=2.5))
    wx, wK = 3.8 * MHz, 2.35 * GHz
    Ds = (wK - wx) / (math.cosh(5) - 1)
    assert rr.minimum == pytest.approx(2 * Ds / (0.69 * MHz * math.cosh(2.5)), rel=1e-9)
    assert rr.minimum == pytest.approx(15.15, abs=0.05)
    assert rwa_ratios(frame_params(d, r_p=3.0)).minimum == pytest.approx(3.37, abs=0.05)
    small = rwa_ratios(frame_params(d, r_p=1e-4))
    assert small.ratio_2ds > 1e6 and small.ratio_2wp > 1e6
    # on resonance omega_p + Delta_s = omega_K, so this one saturates at 2 omega_K / g
    assert small.ratio_wp_ds == pytest.approx(2 * wK / (0.69 * MHz), rel=1e-6)


def fig3_frame():
    return frame_from_detunings(table1_device(), 1.54, -55, -45, -45, lam_r_over_gr=1.0)


def test_fig3_frame_and_dispersive_validity():
    fp = fig3_frame()
    assert fp.g_r / MHz == pytest.approx(1.683, abs=2e-3)
    assert fp.lam_r == pytest.approx(fp.g_r)
    assert fp.Delta_K == pytest.approx(fp.Delta_NV)
    assert fp.omega_p / GHz == pytest.approx(1.013, abs=2e-3)
    rep = dispersive_validity(fp)
    assert rep.ratios["gap_K"] == pytest.approx(10.0, rel=1e-9)
    assert rep.ok
    for k, v in rep.ratios.items():
        if k.startswith("pump"):
            assert v > 100
    res = frame_from_detunings(table1_device(), 1.54, -45, -45)
    rep = dispersive_validity(res)
    assert rep.ratios["gap_K"] < 1e-12 and not rep.ok


def test_effective_ms():
    fp = fig3_frame()
    ep = effective_ms_params(fp)
    assert ep.g_ms == pytest.approx(fp.g_r / 10, rel=1e-9)
    assert ep.Delta_k == pytest.approx(fp.g_r / 10, rel=1e-9)
    assert ep.g_ms == pytest.approx(fp.g_r * fp.lam_r / (fp.Delta_K - fp.Delta_s), rel=1e-15)
    fp0 = frame_from_detunings(table1_device(), 1.54, -55, -45, -45, lam_r_over_gr=0.0)
    ep0 = effective_ms_params(fp0)
    assert ep0.g_ms == 0 and ep0.Delta_n == 0
    with pytest.raises(DegenerateError):
        effective_ms_params(frame_from_detunings(table1_device(), 1.0, -45, -45))


def test_squeezed_bath_coefficients():
    n = 55.0
    N, M = squeezed_bath_coefficients(n, 2.5, 2.5, math.pi)
    assert N == pytest.approx(n, rel=1e-9)
    assert abs(M) < 1e-9 * n * math.cosh(5)
    N, M = squeezed_bath_coefficients(n, 2.5, 0.0, 0.3)
    assert N == pytest.approx(n * math.cosh(5) + math.sinh(2.5) ** 2)
    assert M == pytest.approx(-(2 * n + 1) * math.sinh(5) / 2)
    assert squeezed_bath_coefficients(n, 0, 0, 1.0) == (pytest.approx(n), pytest.approx(0))
    with pytest.raises(DomainError):
        squeezed_bath_coefficients(n, 1, -1, 0)


@settings(max_examples=50, deadline=None)
@given(n=st.floats(0, 100), r=st.floats(0, 2.5), re=st.floats(0, 2.5), th=st.floats(-4, 4))
def test_squeezed_bath_physical(n, r, re, th):
    N, M = squeezed_bath_coefficients(n, r, re, th)
    assert N >= -1e-9 * max(1, N)
    assert abs(M) ** 2 <= N * (N + 1) * (1 + 1e-9) + 1e-9


def test_enhanced_damping():
    d = table1_device()
    fp = frame_params(d.with_Q(1e5), r_p=2.5)
    assert fp.gamma_x_eff / (TWO_PI * 2.8e3) == pytest.approx(1, abs=0.03)
    fp = frame_params(d.with_Q(1e3), r_p=2.5)
    assert fp.gamma_x_eff / (TWO_PI * 0.28e6) == pytest.approx(1, abs=0.03)


def test_table1_rows():
    rows = {r.symbol: r for r in derive_table1()}
    assert 54.3 <= rows["n_x"].derived_value <= 55.5
    assert rows["gamma_x_rad_per_s"].derived_value == pytest.approx(TWO_PI * 0.038, rel=0.01)
    for key in ("g_rad_per_s", "lambda_rad_per_s", "x_zpf_m", "omega_NV_rad_per_s"):
        assert rows[key].status == "documented discrepancy"
    for key in ("n_x", "n_s", "omega_x_rad_per_s", "omega_p_rad_per_s", "Omega_p_rad_per_s"):
        assert rows[key].status == "match", key
