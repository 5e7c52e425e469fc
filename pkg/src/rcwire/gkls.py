"""Global GKLS master equation for harmonic networks: rates, covariance
dynamics, steady states, and stationary heat currents.

Everything lives in the normal-mode picture.  Bath i acts on mode j through
the golden-rule rates

    G_i(+Omega_j) = 2 J_i(Omega_j) (1 - e^{-Omega_j/T_i})^{-1},
    G_i(-Omega_j) = G_i(+Omega_j) e^{-Omega_j/T_i},

whose sums and differences S_ij = G- + G+, D_ij = G- - G+ < 0 drive each
mode's covariance block.  With mode weights w_ij = P_ij^2 / (2 Omega_j) the
effective per-mode damping is D~_j = sum_i w_ij D_ij and the drift matrix is
block diagonal in W_j = D~_j/2 I + [[0, 1], [-Omega_j^2, 0]], so the exact
propagator E(t) = exp(W t) has the closed form e^{D~ t/2} x (rotation),
and c(t) = E (c0 - c_inf) E^T + c_inf.  No ODE stepping is involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ModelError
from .gaussian import CovarianceMatrix
from .network import HarmonicNetwork, NormalModeBasis

SECULAR_RATIO_FLAG = 10.0


@dataclass(frozen=True)
class ModeRates:
    """Golden-rule rates of every bath at every normal-mode frequency."""

    gamma_up: NDArray[np.float64]      # (baths, modes): G_i(-Omega_j), absorption
    gamma_down: NDArray[np.float64]    # (baths, modes): G_i(+Omega_j), emission
    weights: NDArray[np.float64]       # (baths, modes): P_ij^2 / (2 Omega_j)
    rate_sum: NDArray[np.float64]      # S_ij = up + down
    rate_diff: NDArray[np.float64]     # D_ij = up - down, negative
    damping: NDArray[np.float64]       # D~_j = sum_i w_ij D_ij
    drive: NDArray[np.float64]         # S~_j = sum_i w_ij S_ij


def decay_rates(network: HarmonicNetwork, basis: NormalModeBasis) -> ModeRates:
    """Evaluate every bath's rates at the network's mode frequencies."""
    if not network.baths:
        raise ModelError("network has no baths attached")
    omega = basis.frequencies
    n_baths = len(network.baths)
    down = np.empty((n_baths, omega.size))
    up = np.empty((n_baths, omega.size))
    weights = np.empty((n_baths, omega.size))
    for i, bath in enumerate(network.baths):
        j_at = bath.density.evaluate(omega)
        x = omega / bath.temperature
        # occupation via expm1 keeps high-frequency rates from overflowing
        occ = np.where(x > 700.0, 0.0, 1.0 / np.expm1(np.minimum(x, 700.0)))
        down[i] = 2.0 * j_at * (occ + 1.0)
        up[i] = 2.0 * j_at * occ
        weights[i] = basis.mode_matrix[bath.node] ** 2 / (2.0 * omega)
    rate_sum = up + down
    rate_diff = up - down
    return ModeRates(
        gamma_up=up,
        gamma_down=down,
        weights=weights,
        rate_sum=rate_sum,
        rate_diff=rate_diff,
        damping=(weights * rate_diff).sum(axis=0),
        drive=(weights * rate_sum).sum(axis=0),
    )


def steady_state(network: HarmonicNetwork, basis: NormalModeBasis) -> CovarianceMatrix:
    """Stationary covariance: per mode <eta^2> = -S~/(2 D~ Omega),
    <pi^2> = -S~ Omega/(2 D~), vanishing cross terms, rotated to nodes."""
    rates = decay_rates(network, basis)
    if (rates.damping >= 0).any():
        raise ModelError(
            "undamped normal mode: no bath couples to it, steady state undefined"
        )
    omega = basis.frequencies
    ratio = -rates.drive / (2.0 * rates.damping)
    diag = np.empty(2 * omega.size)
    diag[0::2] = ratio / omega
    diag[1::2] = ratio * omega
    return CovarianceMatrix(basis.from_modes(np.diag(diag)))


@dataclass(frozen=True)
class CovarianceTrajectory:
    """Covariances on a time grid, in node coordinates."""

    times: NDArray[np.float64]
    matrices: NDArray[np.float64]  # (T, 2N, 2N)
    label: str

    def covariance(self, index: int) -> CovarianceMatrix:
        return CovarianceMatrix(self.matrices[index])

    def node_position_variance(self, node: int) -> NDArray[np.float64]:
        return self.matrices[:, 2 * node, 2 * node]


def _mode_propagators(
    basis: NormalModeBasis, damping: NDArray, times: NDArray
) -> NDArray:
    """exp(W t) for all times: (T, 2N, 2N) block diagonal closed form."""
    omega = basis.frequencies
    t = times[:, None]
    decay = np.exp(0.5 * damping[None, :] * t)
    cos = np.cos(omega[None, :] * t) * decay
    sin = np.sin(omega[None, :] * t) * decay
    n = omega.size
    prop = np.zeros((times.size, 2 * n, 2 * n))
    for j in range(n):
        prop[:, 2 * j, 2 * j] = cos[:, j]
        prop[:, 2 * j, 2 * j + 1] = sin[:, j] / omega[j]
        prop[:, 2 * j + 1, 2 * j] = -omega[j] * sin[:, j]
        prop[:, 2 * j + 1, 2 * j + 1] = cos[:, j]
    return prop


def propagate(
    network: HarmonicNetwork,
    basis: NormalModeBasis,
    initial: CovarianceMatrix,
    times,
    *,
    label: str | None = None,
) -> CovarianceTrajectory:
    """Exact covariance evolution from the closed-form mode propagators."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or (np.diff(times) < 0).any():
        raise ValueError("times must be a nondecreasing 1-d grid")
    if (times < 0).any():
        raise ValueError("times must be nonnegative")
    if initial.n_modes != network.n_nodes:
        raise ModelError("initial covariance size does not match the network")
    target = steady_state(network, basis)
    c0 = basis.to_modes(initial.data)
    c_inf = basis.to_modes(target.data)
    prop = _mode_propagators(basis, decay_rates(network, basis).damping, times)
    delta = c0 - c_inf
    evolved = np.einsum("tab,bc,tdc->tad", prop, delta, prop) + c_inf[None]
    mats = np.einsum("ab,tbc,dc->tad", basis.phase_space, evolved, basis.phase_space)
    mats = 0.5 * (mats + np.swapaxes(mats, 1, 2))
    return CovarianceTrajectory(times, mats, label or network.label)


def propagate_means(
    network: HarmonicNetwork,
    basis: NormalModeBasis,
    initial_mean,
    times,
) -> NDArray[np.float64]:
    """First-moment evolution <R>(t) = Q exp(W t) Q^T <R>(0); decays to zero."""
    times = np.asarray(times, dtype=float)
    mean0 = np.asarray(initial_mean, dtype=float)
    if mean0.shape != (2 * network.n_nodes,):
        raise ValueError("mean must have length 2N")
    prop = _mode_propagators(basis, decay_rates(network, basis).damping, times)
    r0 = basis.phase_space.T @ mean0
    return np.einsum("tab,b->ta", prop, r0) @ basis.phase_space.T


@dataclass(frozen=True)
class HeatCurrentReport:
    """Stationary heat currents per bath, tagged by the producing method."""

    method: str
    bath_nodes: tuple[int, ...]
    currents: NDArray[np.float64]
    conservation_residual: float
    extras: dict | None = None

    @property
    def total(self) -> float:
        return float(self.currents.sum())


def heat_currents(
    network: HarmonicNetwork,
    basis: NormalModeBasis,
    state: CovarianceMatrix,
) -> HeatCurrentReport:
    """Per-bath currents for an arbitrary Gaussian state of the network.

    Q_i = sum_j [ w_ij D_ij (Omega_j^2 <eta_j^2> + <pi_j^2>)/2
                  + P_ij^2 S_ij / 4 ].
    At the GKLS steady state the sum over baths cancels exactly.
    """
    rates = decay_rates(network, basis)
    omega = basis.frequencies
    c = basis.to_modes(state.data)
    eta2 = np.diag(c)[0::2]
    pi2 = np.diag(c)[1::2]
    energy = 0.5 * (omega**2 * eta2 + pi2)
    p_sq = rates.weights * (2.0 * omega)[None, :]
    currents = (
        rates.weights * rates.rate_diff * energy[None, :]
        + 0.25 * p_sq * rates.rate_sum
    ).sum(axis=1)
    return HeatCurrentReport(
        method="gkls",
        bath_nodes=tuple(b.node for b in network.baths),
        currents=currents,
        conservation_residual=float(currents.sum()),
    )


@dataclass(frozen=True)
class ValidityReport:
    """Advisory diagnostics for the secular weak-coupling treatment."""

    min_mode_gap: float
    max_dissipation: float
    secular_ratio: float
    secular_ok: bool
    weak_coupling_ok: bool


def validity_diagnostics(
    network: HarmonicNetwork, basis: NormalModeBasis
) -> ValidityReport:
    """Compare mode spacings against bath dissipation strengths.

    The secular ratio min_{j != k}(|Omega_j - Omega_k|, 2 Omega_j) over
    max_i gamma_i is flagged below 10; the weak-coupling flag trips when the
    largest dissipation strength reaches the smallest mode frequency.
    """
    omega = basis.frequencies
    gaps = [2.0 * omega.min()]
    if omega.size > 1:
        gaps.append(np.diff(omega).min())
    min_gap = float(min(gaps))
    max_gamma = max(b.density.gamma for b in network.baths)
    ratio = min_gap / max_gamma
    return ValidityReport(
        min_mode_gap=min_gap,
        max_dissipation=float(max_gamma),
        secular_ratio=float(ratio),
        secular_ok=bool(ratio >= SECULAR_RATIO_FLAG),
        weak_coupling_ok=bool(max_gamma < omega.min()),
    )
