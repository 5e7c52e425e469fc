"""Harmonic networks, bath attachments, and normal-mode decompositions.

A network is a set of unit-mass oscillators with potential energy
(1/2) X^T V X; V collects squared node frequencies, nearest-neighbour
couplings -k, and any diagonal counter-term retained in the system
Hamiltonian.  Baths attach to single nodes (at most one per node).

Normal modes diagonalise V = P diag(Omega^2) P^T with Omega ascending and
a fixed sign gauge; the interleaved 2N x 2N orthogonal transform Q maps
mode phase space (eta_1, pi_1, ...) to node phase space (X_1, P_1, ...).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ModelError
from .spectral import SpectralDensity, Underdamped

DEGENERACY_GAP = 1e-9  # relative to the largest mode frequency


@dataclass(frozen=True)
class BathAttachment:
    """A thermal bath of the given spectral density on one network node."""

    node: int
    density: SpectralDensity
    temperature: float

    def __post_init__(self):
        if self.node < 0:
            raise ModelError("bath node index must be nonnegative")
        if self.temperature <= 0:
            raise ModelError("bath temperature must be positive")


@dataclass(frozen=True)
class HarmonicNetwork:
    """Potential matrix plus bath attachments; masses are all one."""

    potential: NDArray[np.float64]
    baths: tuple[BathAttachment, ...] = ()
    label: str = ""

    def __post_init__(self):
        v = np.array(self.potential, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ModelError("potential must be square")
        if np.abs(v - v.T).max() > 1e-12 * max(1.0, np.abs(v).max()):
            raise ModelError("potential must be symmetric")
        v = 0.5 * (v + v.T)
        v.flags.writeable = False
        object.__setattr__(self, "potential", v)
        object.__setattr__(self, "baths", tuple(self.baths))
        nodes = [b.node for b in self.baths]
        if any(n >= v.shape[0] for n in nodes):
            raise ModelError("bath attached to a node outside the network")
        if len(set(nodes)) != len(nodes):
            raise ModelError("at most one bath per node")

    @property
    def n_nodes(self) -> int:
        return self.potential.shape[0]


@dataclass(frozen=True)
class NormalModeBasis:
    """Orthogonal mode matrix P, frequencies Omega, and phase-space Q."""

    mode_matrix: NDArray[np.float64]
    frequencies: NDArray[np.float64]
    phase_space: NDArray[np.float64]

    @property
    def n_nodes(self) -> int:
        return self.frequencies.size

    def to_modes(self, cov: NDArray[np.float64]) -> NDArray[np.float64]:
        """Covariance from node to mode phase space (Q^T C Q)."""
        return self.phase_space.T @ cov @ self.phase_space

    def from_modes(self, cov: NDArray[np.float64]) -> NDArray[np.float64]:
        """Covariance from mode to node phase space (Q c Q^T)."""
        return self.phase_space @ cov @ self.phase_space.T


def build_wire(
    omega_h: float,
    omega_c: float,
    coupling: float,
    *,
    shift_cold: bool = False,
    cold_shift: float = 0.0,
    baths: tuple[BathAttachment, ...] = (),
    label: str = "wire",
) -> HarmonicNetwork:
    """Two-node wire: spring k between nodes of bare frequency w_h and w_c.

    With shift_cold the given counter-term is added to the cold diagonal,
    matching the wire whose cold bath was absorbed into an auxiliary mode.
    """
    if omega_h <= 0 or omega_c <= 0 or coupling <= 0:
        raise ModelError("frequencies and coupling must be positive")
    delta = cold_shift if shift_cold else 0.0
    v = np.array(
        [
            [omega_h**2 + coupling, -coupling],
            [-coupling, omega_c**2 + coupling + delta],
        ]
    )
    return HarmonicNetwork(v, baths, label)


def build_augmented(
    omega_h: float,
    omega_c: float,
    coupling: float,
    cold_density: Underdamped,
    hot_density: SpectralDensity,
    residual_density: SpectralDensity,
    t_hot: float,
    t_cold: float,
    *,
    label: str = "augmented",
) -> HarmonicNetwork:
    """Three-node chain obtained by promoting the cold bath's resonance.

    The underdamped cold density (g, l, w0) becomes an explicit node at w0
    coupled with -l to the cold wire node, whose diagonal keeps the mapping
    counter-term l^2/w0^2; the hot bath stays put and the residual bath
    (dissipation strength g) attaches to the new node at the cold
    temperature.
    """
    if not isinstance(cold_density, Underdamped):
        raise ModelError("the promoted cold bath must be an Underdamped density")
    lam, w0 = cold_density.coupling, cold_density.omega0
    v = np.array(
        [
            [omega_h**2 + coupling, -coupling, 0.0],
            [-coupling, omega_c**2 + coupling + lam**2 / w0**2, -lam],
            [0.0, -lam, w0**2],
        ]
    )
    baths = (
        BathAttachment(0, hot_density, t_hot),
        BathAttachment(2, residual_density, t_cold),
    )
    return HarmonicNetwork(v, baths, label)


def normal_modes(network: HarmonicNetwork) -> NormalModeBasis:
    """Diagonalise the potential; reject indefinite or degenerate spectra.

    Columns are ordered by ascending frequency and sign-fixed so each
    column's largest-magnitude entry is positive, making the decomposition
    deterministic.  Degeneracies (gap below 1e-9 of the largest frequency)
    would make the secular treatment ill-defined and are refused.
    """
    evals, vecs = np.linalg.eigh(network.potential)
    if evals[0] <= 0:
        raise ModelError(
            f"potential is not positive definite (min eigenvalue {evals[0]:.3e})"
        )
    omega = np.sqrt(evals)
    if omega.size > 1 and np.diff(omega).min() < DEGENERACY_GAP * omega[-1]:
        raise ModelError(
            f"nearly degenerate normal modes {omega}; secular rates undefined"
        )
    for j in range(omega.size):
        lead = np.argmax(np.abs(vecs[:, j]))
        if vecs[lead, j] < 0:
            vecs[:, j] = -vecs[:, j]
    n = omega.size
    q = np.zeros((2 * n, 2 * n))
    q[0::2, 0::2] = vecs
    q[1::2, 1::2] = vecs
    return NormalModeBasis(vecs, omega, q)
