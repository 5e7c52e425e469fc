"""Spectral densities, closed-form kernels, and bath correlation functions.

Kernel anchors were frozen from a principal-value Kramers-Kronig integral
(scipy quad with cauchy weight plus an analytic remainder), correlation
anchors from scipy quad on the defining integrals, and the scaled-density
correlation from the analytic residue sum over thermal poles, which three
independent numerical routes confirm to better than 5e-9.
"""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from rcwire.errors import QuadratureError
from rcwire.spectral import (
    OhmicAlgebraic,
    OhmicLinear,
    Underdamped,
    correlation_function,
    fourier_kernel,
    integrated_correlation,
    overdamped_limit,
    renormalisation_shift,
    scaled_underdamped,
    with_cutoff,
)


def test_evaluate_matches_hand_formulas():
    w = np.array([0.0, 0.3, 1.7, 12.0])
    ohmic = OhmicAlgebraic(2.0, 5.0)
    assert np.allclose(ohmic.evaluate(w), 2.0 * 25.0 * w / (w * w + 25.0))
    under = Underdamped(0.8, 1.1, 3.0)
    expect = 0.8 * 1.21 * w / (0.64 * w * w + (w * w - 9.0) ** 2)
    assert np.allclose(under.evaluate(w), expect)
    linear = OhmicLinear(0.4)
    assert np.allclose(linear.evaluate(w), 0.4 * w)


def test_slope_at_zero_and_tail_power():
    assert OhmicAlgebraic(2.0, 5.0).slope_at_zero() == pytest.approx(2.0)
    under = Underdamped(0.8, 1.1, 3.0)
    assert under.slope_at_zero() == pytest.approx(0.8 * 1.21 / 81.0)
    assert OhmicLinear(0.4).slope_at_zero() == pytest.approx(0.4)
    # J/w at tiny w approaches the slope
    assert under.evaluate(np.array([1e-7]))[0] / 1e-7 == pytest.approx(
        under.slope_at_zero(), rel=1e-9
    )


def test_parameter_validation():
    with pytest.raises(ValueError, match="positive"):
        OhmicAlgebraic(-1.0, 5.0)
    with pytest.raises(ValueError, match="positive"):
        Underdamped(0.5, 0.0, 4.0)
    with pytest.raises(ValueError, match="positive"):
        OhmicLinear(0.0)
    with pytest.raises(ValueError, match="omega >= 0"):
        OhmicAlgebraic(1.0, 5.0).evaluate(np.array([-0.1]))


def test_with_cutoff_regularises_linear_only():
    linear = OhmicLinear(0.7)
    reg = with_cutoff(linear, 200.0)
    assert isinstance(reg, OhmicAlgebraic)
    assert reg.gamma == 0.7 and reg.cutoff == 200.0
    with pytest.raises(ValueError, match="no cutoff of its own"):
        with_cutoff(linear, None)
    under = Underdamped(0.5, 0.9, 4.0)
    assert with_cutoff(under, 123.0) is under


def test_renormalisation_shift_matches_static_kernel():
    ohmic = OhmicAlgebraic(2.0, 5.0)
    assert renormalisation_shift(ohmic) == pytest.approx(10.0)
    under = Underdamped(0.8, 1.1, 3.0)
    assert renormalisation_shift(under) == pytest.approx(1.21 / 9.0)
    # the shift is exactly the static limit of the retarded kernel
    assert fourier_kernel(ohmic, 0.0).real == pytest.approx(10.0)
    assert fourier_kernel(under, 0.0).real == pytest.approx(1.21 / 9.0)
    assert renormalisation_shift(OhmicLinear(0.7), 200.0) == pytest.approx(140.0)


def test_fourier_kernel_kramers_kronig_anchors():
    # real parts frozen from the principal-value transform of J
    k = fourier_kernel(OhmicAlgebraic(2.0, 5.0), 1.7)
    assert abs(k.real - 8.963786303335) < 1e-10
    k2 = fourier_kernel(Underdamped(0.8, 1.1, 3.0), 2.2)
    assert abs(k2.real - 0.246706398996236) < 1e-13
    # imaginary part is the spectral density itself on w > 0
    for density in (OhmicAlgebraic(2.0, 5.0), Underdamped(0.8, 1.1, 3.0)):
        w = np.array([0.4, 1.7, 6.3])
        kk = fourier_kernel(density, w)
        assert np.allclose(kk.imag, density.evaluate(w), rtol=1e-14)


def test_overdamped_limit_of_scaled_family():
    a1, a2 = 1e-3, 1e3
    limit = overdamped_limit(a1, a2)
    w = np.geomspace(1e-2, 10.0, 41)
    previous = None
    for gamma in (1e3, 1e4):
        scaled = scaled_underdamped(a1, a2, gamma)
        assert scaled.omega0 == pytest.approx(math.sqrt(a2 * gamma))
        rel = np.max(np.abs(scaled.evaluate(w) - limit.evaluate(w)) / limit.evaluate(w))
        assert rel < 1e-3
        if previous is not None:
            assert rel < 0.2 * previous
        previous = rel
    with pytest.raises(ValueError, match="positive"):
        scaled_underdamped(0.0, a2, 1e3)


def test_correlation_function_underdamped_anchors():
    density = Underdamped(0.5, 0.9, 4.0)
    c = correlation_function(density, 1.2, 0.3)
    assert abs(c.real - 3.805556387066784e-02) < 1e-8 * abs(c.real)
    assert abs(c.imag - (-8.764143291252419e-02)) < 1e-8 * abs(c.imag)
    c0 = correlation_function(density, 1.2, 0.0)
    assert abs(c0.real - 1.070231820778565e-01) < 1e-10 * c0.real
    assert c0.imag == 0.0


def test_integrated_correlation_underdamped_anchor():
    density = Underdamped(0.5, 0.9, 4.0)
    v = integrated_correlation(density, 1.2, 0.8)
    assert abs(v.real - 2.461549985732324e-03) < 1e-8 * abs(v.real)
    assert abs(v.imag - (-4.607609727332093e-02)) < 1e-8 * abs(v.imag)
    assert integrated_correlation(density, 1.2, 0.0) == 0.0


def test_integrated_correlation_is_time_integral():
    # dual route: Simpson over the pointwise correlation must reproduce
    # the directly integrated transform
    density = Underdamped(0.5, 0.9, 4.0)
    temperature = 1.2
    ts = np.linspace(0.0, 0.8, 401)
    vals = np.array(
        [correlation_function(density, temperature, float(t), 1e-10) for t in ts]
    )
    for j in range(80, 401, 80):
        direct = simpson(vals[: j + 1], x=ts[: j + 1])
        integ = integrated_correlation(density, temperature, float(ts[j]), 1e-10)
        assert abs(direct - integ) <= 1e-6 * abs(integ)


def test_scaled_correlation_against_riemann_and_residue_sum():
    # the sharply peaked scaled density at a lag far beyond its memory
    # time: the value is ~1e-5 while the integrand scale is ~1e-3, all of
    # it oscillation cancellation
    density = scaled_underdamped(1e-3, 1e3, 1e3)
    temperature, t = 0.5, 0.1
    # analytic residue sum over the thermal poles y_k = 2 pi T k; the
    # resonance-pole contribution is suppressed by e^{-gamma t / 2} ~ 1e-22
    residue = -3.155137743008468e-05
    w = np.arange(1_000_000, dtype=float) + 0.5
    oracle = float(
        np.sum(density.evaluate(w) / np.tanh(w / (2.0 * temperature)) * np.cos(w * t))
        / np.pi
    )
    assert abs(oracle - residue) < 1e-7 * abs(residue)
    value = correlation_function(density, temperature, t, 1e-6)
    assert abs(value.real - oracle) < 1e-6 * abs(oracle)
    assert abs(value.imag) < 1e-12


def test_correlation_rejects_divergent_inputs():
    with pytest.raises(ValueError, match="temperature must be positive"):
        correlation_function(Underdamped(0.5, 0.9, 4.0), 0.0, 0.1)
    with pytest.raises(ValueError, match="nonnegative"):
        correlation_function(Underdamped(0.5, 0.9, 4.0), 1.2, -0.1)
    # algebraic-cutoff J falls off like 1/w only: at t = 0 there is no
    # oscillation credit and the tail never closes
    with pytest.raises(QuadratureError, match="tail bound not met") as info:
        correlation_function(OhmicAlgebraic(1.0, 5.0), 1.0, 0.0)
    assert "achieved_error" in info.value.diagnostics
    # strictly linear J grows, so the oscillatory tail outruns any budget
    with pytest.raises(QuadratureError, match="more panels than the budget"):
        correlation_function(OhmicLinear(0.5), 1.0, 0.5)


def test_oscillation_seeding_budget():
    with pytest.raises(QuadratureError, match="oscillation seeding"):
        correlation_function(Underdamped(0.5, 0.9, 4.0), 1.2, 1e9)
