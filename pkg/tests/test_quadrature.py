"""Adaptive panel integrator against closed-form infinite integrals."""

import numpy as np
import pytest

from rcwire.errors import QuadratureError
from rcwire.quadrature import TailRule, integrate_adaptive


def lorentzian_sq(w):
    return 1.0 / (1.0 + w * w) ** 2


def test_cosine_transform_squared_lorentzian():
    # int_0^inf cos(w t) / (1 + w^2)^2 dw = (pi/4) (1 + t) e^{-t}
    t = 0.7

    def f(w):
        return (np.cos(w * t) * lorentzian_sq(w))[None, :]

    res = integrate_adaptive(
        f, [0.0, 1.0, 10.0], 1e-10, tail=TailRule(power=4.0, osc_time=t)
    )
    exact = 0.25 * np.pi * (1.0 + t) * np.exp(-t)
    assert res.value.shape == (1,)
    assert abs(res.value[0] - exact) <= 1e-9 * exact
    assert res.error_estimate[0] <= 1e-10 * exact * 1.0001


def test_sine_transform_squared_lorentzian():
    # int_0^inf w sin(w t) / (1 + w^2)^2 dw = (pi/4) t e^{-t}
    t = 1.3

    def f(w):
        return (w * np.sin(w * t) * lorentzian_sq(w))[None, :]

    res = integrate_adaptive(
        f, [0.0, 1.0, 10.0], 1e-8, tail=TailRule(power=3.0, osc_time=t)
    )
    exact = 0.25 * np.pi * t * np.exp(-t)
    assert abs(res.value[0] - exact) <= 1e-7 * exact


def test_finite_interval_arctangent():
    def f(w):
        return (1.0 / (1.0 + w * w))[None, :]

    res = integrate_adaptive(f, [0.0, 2.0, 40.0], 1e-12)
    assert abs(res.value[0] - np.arctan(40.0)) <= 1e-11


def test_sharp_lorentzian_peak_resolved():
    # width-1e-3 resonance at w = 5; the seeding panel is 20 widths across,
    # so almost all of the mass comes from adaptive zooming
    a = 1e-3

    def f(w):
        return (a / (a * a + (w - 5.0) ** 2))[None, :]

    res = integrate_adaptive(f, [0.0, 4.99, 5.01, 10.0], 1e-12)
    exact = np.arctan(5.0 / a) + np.arctan(5.0 / a)
    assert abs(res.value[0] - exact) <= 1e-11 * exact
    assert res.panels_used > 20


def test_vector_integrand_components_converge_together():
    t = 0.9

    def f(w):
        base = lorentzian_sq(w)
        return np.stack([np.cos(w * t) * base, w * np.sin(w * t) * base])

    rtol = 1e-9
    res = integrate_adaptive(
        f, [0.0, 1.0, 10.0], rtol, tail=TailRule(power=3.0, osc_time=t)
    )
    exact = 0.25 * np.pi * np.exp(-t) * np.array([1.0 + t, t])
    assert np.all(np.abs(res.value - exact) <= 1e-8 * exact)
    # documented criterion: err_k <= rtol * max(|I_k|, floor * max_j |I_j|)
    scale = np.maximum(np.abs(res.value), 1e-6 * np.abs(res.value).max())
    assert np.all(res.error_estimate <= rtol * scale * 1.0001)


def test_floor_fraction_one_loosens_small_components():
    t = 0.9

    def f(w):
        base = lorentzian_sq(w)
        return np.stack([np.cos(w * t) * base, 1e-3 * w * np.sin(w * t) * base])

    rtol = 1e-9
    res = integrate_adaptive(
        f,
        [0.0, 1.0, 10.0],
        rtol,
        tail=TailRule(power=3.0, osc_time=t),
        floor_fraction=1.0,
    )
    # every component is now held to the dominant magnitude only
    assert np.all(res.error_estimate <= rtol * np.abs(res.value).max() * 1.0001)


def test_deterministic_rerun_and_bookkeeping():
    def f(w):
        return (1.0 / (1.0 + w * w) ** 2)[None, :]

    a = integrate_adaptive(f, [0.0, 1.0, 10.0], 1e-10, tail=TailRule(power=4.0))
    b = integrate_adaptive(f, [0.0, 1.0, 10.0], 1e-10, tail=TailRule(power=4.0))
    assert np.array_equal(a.value, b.value)
    assert np.array_equal(a.error_estimate, b.error_estimate)
    assert a.panels_used == b.panels_used and a.evaluations == b.evaluations
    assert a.evaluations >= 15 * a.panels_used
    assert np.all(a.error_estimate >= 0.0)
    # duplicate breakpoints collapse instead of making zero-width panels
    c = integrate_adaptive(
        f, [0.0, 1.0, 1.0, 10.0], 1e-10, tail=TailRule(power=4.0)
    )
    assert np.array_equal(a.value, c.value)


def test_tail_rule_bound_caps():
    env = np.array([2.0, 6.0])
    assert np.allclose(TailRule(power=3.0).bound(10.0, env), env * 5.0)
    assert np.allclose(TailRule(power=1.0, osc_time=2.0).bound(8.0, env), env)
    # both caps present: the smaller one wins
    both = TailRule(power=2.0, osc_time=4.0).bound(5.0, env)
    assert np.allclose(both, np.minimum(env * 5.0, env / 2.0))
    assert np.all(np.isinf(TailRule(power=1.0).bound(5.0, env)))


def test_unbounded_tail_reports_octave_exhaustion():
    def f(w):
        return (1.0 / (1.0 + w))[None, :]

    with pytest.raises(QuadratureError, match="tail bound not met") as info:
        integrate_adaptive(f, [0.0, 10.0], 1e-8, tail=TailRule(power=1.0))
    diag = info.value.diagnostics
    assert diag["last_W"] > 1e20
    assert "achieved_error" in diag and "rtol" in diag


def test_oscillatory_tail_exceeds_panel_budget():
    def f(w):
        return (np.cos(w) / (1.0 + w * w))[None, :]

    with pytest.raises(QuadratureError, match="more panels than the budget") as info:
        integrate_adaptive(
            f,
            [0.0, 10.0],
            1e-13,
            tail=TailRule(power=2.0, osc_time=1.0),
            max_panels=2000,
        )
    diag = info.value.diagnostics
    assert diag["panels"] <= 2000 and diag["segments"] > 0
    assert "achieved_error" in diag


def test_refinement_exhaustion_reports_worst_component():
    a = 1e-3

    def f(w):
        return (a / (a * a + (w - 5.0) ** 2))[None, :]

    with pytest.raises(QuadratureError, match="adaptive refinement exhausted") as info:
        integrate_adaptive(f, [0.0, 4.99, 5.01, 10.0], 1e-12, max_rounds=1)
    diag = info.value.diagnostics
    assert diag["achieved_error"] > diag["required"]
    assert diag["worst_component"] == 0
    assert diag["rtol"] == 1e-12


def test_breakpoint_validation():
    def f(w):
        return w[None, :]

    with pytest.raises(ValueError, match="at least two breakpoints"):
        integrate_adaptive(f, [5.0], 1e-8)
    with pytest.raises(ValueError, match="must be finite"):
        integrate_adaptive(f, [0.0, np.inf], 1e-8)
