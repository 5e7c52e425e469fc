"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures (quadrature, stability, physicality) exit with 3.
"""
from __future__ import annotations


class ModelError(ValueError):
    """A network or bath specification is physically inadmissible."""


class StabilityError(ModelError):
    """The coupled system has an unstable (non positive definite) potential."""


class PhysicalityError(ValueError):
    """A covariance matrix violates the Heisenberg bound beyond tolerance."""


class ConditioningError(RuntimeError):
    """A matrix function could not be evaluated reliably.

    Carries a short diagnostic of the offending spectrum so failures can be
    reported without re-running the computation.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class QuadratureError(RuntimeError):
    """Adaptive integration failed to reach the requested tolerance."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(ValueError):
    """A benchmark configuration file or override is invalid."""
