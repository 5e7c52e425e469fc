"""Harmonic thermal machines with structured baths, two ways.

rcwire models small networks of coupled oscillators driven by heat baths
and solves them along two independent routes: a perturbative master
equation in the network's normal modes, and the exact stationary state of
the corresponding quantum Langevin equations.  Structured baths can be
traded for an auxiliary network mode damped by a flat residual bath, and
the two routes are compared through the fidelity of their Gaussian states.
"""
from .errors import (
    ConditioningError,
    ConfigError,
    ModelError,
    PhysicalityError,
    QuadratureError,
    StabilityError,
)
from .gaussian import (
    CovarianceMatrix,
    is_physical,
    reduce_modes,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_covariance,
    uhlmann_fidelity,
)
from .gkls import (
    CovarianceTrajectory,
    HeatCurrentReport,
    ModeRates,
    ValidityReport,
    decay_rates,
    heat_currents,
    propagate,
    steady_state,
    validity_diagnostics,
)
from .network import (
    BathAttachment,
    HarmonicNetwork,
    NormalModeBasis,
    build_augmented,
    build_wire,
    normal_modes,
)
from .qle import (
    ExactStationaryResult,
    LangevinModel,
    StabilityReport,
    exact_heat_currents,
    exact_stationary,
    exact_steady_covariance,
    langevin_model,
    stability_scan,
    susceptibility,
)
from .quadrature import QuadratureResult, TailRule, integrate_adaptive
from .spectral import (
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

__version__ = "0.1.0"

__all__ = [
    "BathAttachment",
    "ConditioningError",
    "ConfigError",
    "CovarianceMatrix",
    "CovarianceTrajectory",
    "ExactStationaryResult",
    "HarmonicNetwork",
    "HeatCurrentReport",
    "LangevinModel",
    "ModeRates",
    "ModelError",
    "NormalModeBasis",
    "OhmicAlgebraic",
    "OhmicLinear",
    "PhysicalityError",
    "QuadratureError",
    "QuadratureResult",
    "StabilityError",
    "StabilityReport",
    "TailRule",
    "Underdamped",
    "ValidityReport",
    "build_augmented",
    "build_wire",
    "correlation_function",
    "decay_rates",
    "exact_heat_currents",
    "exact_stationary",
    "exact_steady_covariance",
    "fourier_kernel",
    "heat_currents",
    "integrate_adaptive",
    "integrated_correlation",
    "is_physical",
    "langevin_model",
    "normal_modes",
    "overdamped_limit",
    "propagate",
    "reduce_modes",
    "renormalisation_shift",
    "scaled_underdamped",
    "stability_scan",
    "steady_state",
    "symplectic_eigenvalues",
    "symplectic_form",
    "thermal_covariance",
    "uhlmann_fidelity",
    "validity_diagnostics",
    "with_cutoff",
]
