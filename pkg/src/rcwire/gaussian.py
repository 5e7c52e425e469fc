"""Gaussian-state covariance algebra.

Phase-space vectors are ordered (X_1, P_1, ..., X_N, P_N) with [X, P] = i
and hbar = 1, so covariances are C_jk = <(1/2){r_j, r_k}> - <r_j><r_k> and
the vacuum covariance is I/2.  All states handled here have zero mean.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import ConditioningError, PhysicalityError

#: symplectic eigenvalues may undershoot the Heisenberg bound 1/2 by this much
PHYSICALITY_TOL = 1e-9

_EIG_CLAMP = -1e-12  # eigenvalues in [_EIG_CLAMP, 0) are treated as exact zeros


def symplectic_form(n_modes: int) -> NDArray[np.float64]:
    """Return the 2N x 2N symplectic form, block diagonal in [[0, 1], [-1, 0]]."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    theta = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        theta[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = block
    return theta


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric covariance matrix of a zero-mean Gaussian state.

    The wrapped array is copied and frozen; symmetry is enforced at
    construction (within 1e-12 relative) but physicality is not, so that
    diagnostics can still inspect slightly unphysical numerical output.
    """

    data: NDArray[np.float64]
    n_modes: int = field(init=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise ValueError(f"covariance must be 2N x 2N, got {arr.shape}")
        scale = max(np.abs(arr).max(), 1.0)
        asym = np.abs(arr - arr.T).max()
        if asym > 1e-12 * scale:
            raise ValueError(f"covariance not symmetric: |C - C^T| = {asym:.3e}")
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "n_modes", arr.shape[0] // 2)

    @classmethod
    def vacuum(cls, n_modes: int) -> "CovarianceMatrix":
        return cls(0.5 * np.eye(2 * n_modes))


def symplectic_eigenvalues(cov: CovarianceMatrix) -> NDArray[np.float64]:
    """Symplectic spectrum of the state, ascending.

    The eigenvalues of Theta C come in pairs +-(i nu_j); the nu_j are returned.
    """
    theta = symplectic_form(cov.n_modes)
    eigs = np.linalg.eigvals(theta @ cov.data)
    nu = np.sort(np.abs(eigs))
    return nu[::2]


def is_physical(cov: CovarianceMatrix, tol: float = PHYSICALITY_TOL) -> bool:
    """True iff every symplectic eigenvalue is >= 1/2 - tol."""
    return bool(symplectic_eigenvalues(cov).min() >= 0.5 - tol)


def require_physical(cov: CovarianceMatrix, tol: float, context: str) -> None:
    if not is_physical(cov, tol):
        nu_min = symplectic_eigenvalues(cov).min()
        raise PhysicalityError(
            f"{context}: smallest symplectic eigenvalue {nu_min:.12g} < 1/2 - {tol:g}"
        )


def reduce_modes(cov: CovarianceMatrix, keep: tuple[int, ...]) -> CovarianceMatrix:
    """Partial trace down to the listed modes, preserving their order."""
    keep = tuple(keep)
    if len(set(keep)) != len(keep) or any(j < 0 or j >= cov.n_modes for j in keep):
        raise ValueError(f"invalid mode selection {keep} for {cov.n_modes} modes")
    idx = np.array([2 * j + o for j in keep for o in (0, 1)])
    return CovarianceMatrix(cov.data[np.ix_(idx, idx)])


def thermal_covariance(basis, temperature: float) -> CovarianceMatrix:
    """Gibbs-state covariance of a harmonic network in original coordinates.

    Per normal mode the thermal variances are <eta^2> = coth(Omega/2T)/(2 Omega)
    and <pi^2> = Omega coth(Omega/2T)/2; they are rotated back through the
    basis' phase-space transform.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    omega = basis.frequencies
    c = 1.0 / np.tanh(omega / (2.0 * temperature))
    diag = np.empty(2 * omega.size)
    diag[0::2] = c / (2.0 * omega)
    diag[1::2] = 0.5 * omega * c
    return CovarianceMatrix(basis.from_modes(np.diag(diag)))


def _sqrt_clamped(mat: NDArray, context: str) -> NDArray:
    """Principal square root via eigendecomposition, clamping tiny negatives.

    Real eigenvalue parts in [-1e-12, 0) count as zero; anything more negative
    means the fidelity expression lost positivity and is reported as a
    conditioning failure rather than silently continued.
    """
    lam, vec = np.linalg.eig(mat)
    clamp = _EIG_CLAMP * max(1.0, np.abs(lam).max())
    if (lam.real < clamp).any():
        raise ConditioningError(
            f"{context}: nonpositive eigenvalue inside a matrix root",
            {"eigenvalues": lam, "most_negative": lam.real.min()},
        )
    lam = np.where((lam.real >= clamp) & (lam.real < 0.0), 0.0, lam)
    return vec @ np.diag(np.sqrt(lam.astype(complex))) @ np.linalg.inv(vec)


def _logdet_psd(mat: NDArray, context: str) -> float:
    sign, logdet = np.linalg.slogdet(mat)
    if sign <= 0:
        raise ConditioningError(
            f"{context}: determinant not positive", {"sign": sign, "logdet": logdet}
        )
    return logdet


def uhlmann_fidelity(cov_a: CovarianceMatrix, cov_b: CovarianceMatrix) -> float:
    """Uhlmann fidelity of two zero-mean Gaussian states.

    Evaluates the closed-form expression built from the auxiliary matrix

        C_aux = Theta^T (C_a + C_b)^{-1} (Theta/4 + C_b Theta C_a),

    as F = det(2 (sqrt(1 + (C_aux Theta)^{-2}/4) + 1) C_aux)^{1/2}
           / det(C_a + C_b)^{1/2},

    with determinants accumulated as log sums.  Both inputs must describe
    physical states (a 1e-6 slack absorbs quadrature-level violations).
    """
    if cov_a.n_modes != cov_b.n_modes:
        raise ValueError("fidelity requires equal mode counts")
    require_physical(cov_a, 1e-6, "fidelity input A")
    require_physical(cov_b, 1e-6, "fidelity input B")
    n = cov_a.n_modes
    theta = symplectic_form(n)
    total = cov_a.data + cov_b.data
    rhs = theta / 4.0 + cov_b.data @ theta @ cov_a.data
    try:
        c_aux = theta.T @ np.linalg.solve(total, rhs)
        w = c_aux @ theta
        g = np.eye(2 * n) + np.linalg.inv(w @ w) / 4.0
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"fidelity: singular intermediate ({exc})") from exc
    root = _sqrt_clamped(g, "fidelity")
    m = 2.0 * (root + np.eye(2 * n, dtype=complex)) @ c_aux
    sign, logdet_m = np.linalg.slogdet(m)
    if abs(sign.imag) > 1e-8 or sign.real <= 0:
        raise ConditioningError(
            "fidelity: determinant not positive real", {"sign": sign}
        )
    logdet_total = _logdet_psd(total, "fidelity")
    fid = float(np.exp(0.5 * logdet_m.real - 0.5 * logdet_total))
    return min(fid, 1.0)
