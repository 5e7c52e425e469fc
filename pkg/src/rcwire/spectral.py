"""Bath spectral densities, renormalisation shifts, and correlation integrals.

Three families cover every bath in the benchmarks:

* OhmicAlgebraic: J(w) = g L^2 w / (w^2 + L^2), Ohmic at small w with an
  algebraic cutoff at L.  Renormalisation shift g L.
* Underdamped: J(w) = g l^2 w / (g^2 w^2 + (w^2 - w0^2)^2), a resonance of
  width g/2 around w0 carrying total shift l^2 / w0^2.  Its large-g limit
  at fixed a1 = l^2/(g w0^... ) is taken through scaled_underdamped below.
* OhmicLinear: J(w) = g w with no cutoff of its own.  Quantities that need
  a cutoff (shift, Fourier kernel) must be handed one explicitly and then
  use the algebraic form; without one they are refused.

Correlation functions are frequency integrals over [0, inf),

    <B(t) B(0)> = (1/pi) Int dw J(w) [coth(w/2T) cos(wt) - i sin(wt)],

evaluated with the shared adaptive panel integrator; the running integral
over time swaps the time integration inside analytically (cos -> sin(wt)/w,
sin -> (1-cos(wt))/w).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .errors import QuadratureError
from .quadrature import TailRule, integrate_adaptive


def _check_omega(omega) -> NDArray[np.float64]:
    w = np.asarray(omega, dtype=float)
    if (w < 0).any():
        raise ValueError("spectral densities are defined on omega >= 0")
    return w


@dataclass(frozen=True)
class OhmicAlgebraic:
    """Ohmic spectral density with algebraic high-frequency cutoff."""

    gamma: float
    cutoff: float

    tag = 0

    def __post_init__(self):
        if self.gamma <= 0 or self.cutoff <= 0:
            raise ValueError("gamma and cutoff must be positive")

    @property
    def params(self) -> NDArray[np.float64]:
        return np.array([self.gamma, self.cutoff, 0.0])

    def evaluate(self, omega):
        w = _check_omega(omega)
        return kernels.j_over_omega(w, self.tag, self.params) * w

    def slope_at_zero(self) -> float:
        return self.gamma

    #: envelope decay exponent of J at large frequency, for tail bounds
    tail_power = 1.0


@dataclass(frozen=True)
class Underdamped:
    """Lorentzian-peaked spectral density of an underdamped auxiliary mode."""

    gamma: float
    coupling: float
    omega0: float

    tag = 1

    def __post_init__(self):
        if self.gamma <= 0 or self.coupling <= 0 or self.omega0 <= 0:
            raise ValueError("gamma, coupling and omega0 must be positive")

    @property
    def params(self) -> NDArray[np.float64]:
        return np.array([self.gamma, self.coupling, self.omega0])

    def evaluate(self, omega):
        w = _check_omega(omega)
        return kernels.j_over_omega(w, self.tag, self.params) * w

    def slope_at_zero(self) -> float:
        return self.gamma * self.coupling**2 / self.omega0**4

    tail_power = 3.0


@dataclass(frozen=True)
class OhmicLinear:
    """Strictly linear J(w) = g w; cutoff-dependent quantities need help."""

    gamma: float

    tag = 2

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def params(self) -> NDArray[np.float64]:
        return np.array([self.gamma, 0.0, 0.0])

    def evaluate(self, omega):
        w = _check_omega(omega)
        return self.gamma * w

    def slope_at_zero(self) -> float:
        return self.gamma

    tail_power = -1.0


SpectralDensity = OhmicAlgebraic | Underdamped | OhmicLinear


def with_cutoff(density: SpectralDensity, cutoff: float | None) -> SpectralDensity:
    """Resolve an OhmicLinear density to its algebraic-cutoff regularisation."""
    if isinstance(density, OhmicLinear):
        if cutoff is None:
            raise ValueError(
                "OhmicLinear has no cutoff of its own; pass one explicitly"
            )
        return OhmicAlgebraic(density.gamma, cutoff)
    return density


def renormalisation_shift(density: SpectralDensity, cutoff: float | None = None) -> float:
    """Potential counter-term delta = (2/pi) Int dw J(w)/w.

    OhmicAlgebraic gives g L, Underdamped gives l^2/w0^2, and OhmicLinear is
    divergent unless regularised by an explicit cutoff (then g * cutoff).
    """
    density = with_cutoff(density, cutoff)
    if isinstance(density, OhmicAlgebraic):
        return density.gamma * density.cutoff
    return density.coupling**2 / density.omega0**2


def fourier_kernel(density: SpectralDensity, omega, cutoff: float | None = None):
    """One-sided Fourier transform chi(w) of the dissipation kernel.

    Satisfies Im chi(w) = J(w) for w > 0 and chi(0) = renormalisation shift.
    """
    density = with_cutoff(density, cutoff)
    w = np.asarray(omega, dtype=float)
    return kernels.kernel_fourier(w, density.tag, density.params)


def scaled_underdamped(alpha1: float, alpha2: float, gamma: float) -> Underdamped:
    """Underdamped density at coupling l^2 = a1 a2 g and resonance w0^2 = a2 g.

    Along this scaling the g -> infinity limit of J is the overdamped Ohmic
    curve a1 a2 w / (w^2 + a2^2), i.e. OhmicAlgebraic(a1/a2, a2).
    """
    if alpha1 <= 0 or alpha2 <= 0 or gamma <= 0:
        raise ValueError("alpha1, alpha2 and gamma must be positive")
    return Underdamped(gamma, np.sqrt(alpha1 * alpha2 * gamma), np.sqrt(alpha2 * gamma))


def overdamped_limit(alpha1: float, alpha2: float) -> OhmicAlgebraic:
    """The g -> infinity curve of the scaled_underdamped family."""
    return OhmicAlgebraic(alpha1 / alpha2, alpha2)


def _feature_breakpoints(density: SpectralDensity, temperature: float, t: float):
    pts = [0.0]
    if isinstance(density, OhmicAlgebraic):
        pts += [density.cutoff, 2.0 * density.cutoff]
        w_max = 4.0 * density.cutoff
    elif isinstance(density, Underdamped):
        half = 0.5 * density.gamma
        pts += [max(density.omega0 - half, 0.0), density.omega0, density.omega0 + half]
        w_max = 2.0 * (density.omega0 + density.gamma)
    else:
        w_max = 0.0
    pts.append(8.0 * temperature)  # thermal crossover of coth
    w_max = max(w_max, 16.0 * temperature)
    if t > 0.0:
        # seed panels no wider than half an oscillation of cos/sin(wt)
        step = np.pi / t
        count = int(np.ceil(w_max / step))
        if count > 60_000:
            raise QuadratureError(
                f"oscillation seeding would need {count} panels",
                {"t": t, "w_max": w_max},
            )
        if count >= 2:
            pts += list(np.arange(1, count + 1) * step)
    pts.append(w_max)
    return sorted(p for p in set(pts) if 0.0 <= p <= w_max) or [0.0, w_max]


def _correlation_quadrature(
    density: SpectralDensity,
    temperature: float,
    t: float,
    integrated: bool,
    rtol: float,
):
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if t < 0:
        raise ValueError("time lag must be nonnegative")
    if integrated and t == 0.0:
        return complex(0.0, 0.0)
    tag, params = density.tag, density.params

    def f(w):
        return kernels.bath_integrand(w, tag, params, temperature, t, int(integrated))

    # the time integral gains 1/w, steepening the envelope by one power
    power = density.tail_power + (1.0 if integrated else 0.0)
    tail = TailRule(power=power, osc_time=t if t > 0 else None)
    # The two components are one complex number; rtol targets its modulus.
    # A heavily cancelled part (Im at gamma*t >> 1) may sit ten orders below
    # the other and must not drag the tail cutoff out after it.
    res = integrate_adaptive(
        f,
        _feature_breakpoints(density, temperature, t),
        rtol,
        tail=tail,
        floor_fraction=1.0,
    )
    return complex(res.value[0], res.value[1])


def correlation_function(
    density: SpectralDensity,
    temperature: float,
    t: float,
    rtol: float = 1e-10,
) -> complex:
    """Thermal bath correlation <B(t) B(0)> at lag t >= 0.

    Divergent cases (equal-time value for densities with 1/w tails, or
    OhmicLinear at any lag) surface as QuadratureError rather than a number.
    """
    return _correlation_quadrature(density, temperature, t, False, rtol)


def integrated_correlation(
    density: SpectralDensity,
    temperature: float,
    t: float,
    rtol: float = 1e-10,
) -> complex:
    """Running integral Int_0^t ds <B(s) B(0)>, the finite-time memory weight."""
    return _correlation_quadrature(density, temperature, t, True, rtol)
