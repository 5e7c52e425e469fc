"""Exact stationary states of linearly damped harmonic networks.

For a network with baths attached, the steady-state Heisenberg-Langevin
equations close in frequency space: positions obey A(w) X(w) = F(w) with

    A(w) = V - w^2 - diag(chi_a(w) - chi_a(0)),

where each attached bath contributes its retarded kernel chi (Im chi = J on
w > 0) and thermal noise enters through the fluctuation-dissipation weight
coth(w/2T) Im chi(w) of each channel.  The renormalisation counter-term
delta = chi(0) cancels the kernel's static part exactly; the subtraction is
done analytically inside the kernel backend because delta grows with the
bath cutoff and would otherwise contaminate the stiffness diagonal with
eps * delta cancellation noise.  Stationary covariances and heat currents
are frequency integrals over [0, inf), evaluated with the shared adaptive
panel integrator; all integrands for one model share a single panel
structure.

A(0) = V exactly, so positive definiteness of the network potential is the
stability condition checked here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .errors import ModelError, PhysicalityError, QuadratureError, StabilityError
from .gaussian import CovarianceMatrix, is_physical, symplectic_eigenvalues
from .gkls import HeatCurrentReport
from .network import HarmonicNetwork
from .quadrature import QuadratureResult, TailRule, integrate_adaptive
from .spectral import SpectralDensity, with_cutoff

PHYSICALITY_SLACK = 1e-6  # quadrature-level tolerance on the Heisenberg bound


@dataclass(frozen=True)
class LangevinModel:
    """Frequency-domain description of a damped network.

    potential is the network potential (counter-terms live inside the
    subtracted kernels, never here); kernel and noise-channel parameters
    are stored in the flat tag/params encoding shared with the kernels
    backend.
    """

    potential: NDArray[np.float64]
    kernel_tag: NDArray[np.int64]        # (N,), -1 marks a kernel-free node
    kernel_params: NDArray[np.float64]   # (N, 3)
    channel_node: NDArray[np.int64]      # (B,)
    channel_tag: NDArray[np.int64]
    channel_params: NDArray[np.float64]  # (B, 3)
    channel_temp: NDArray[np.float64]
    label: str

    @property
    def n_nodes(self) -> int:
        return self.potential.shape[0]


def langevin_model(
    network: HarmonicNetwork, *, linear_cutoff: float | None = None
) -> LangevinModel:
    """Resolve a bathed network into its exact Langevin description.

    Each attachment registers a dissipation kernel and a noise channel at
    its node.  OhmicLinear residual baths need the explicit linear_cutoff
    regularisation.
    """
    n = network.n_nodes
    if n > 3:
        raise ModelError("exact solver supports at most 3 nodes")
    if not network.baths:
        raise ModelError("exact treatment needs at least one attached bath")
    ktag = np.full(n, -1, dtype=np.int64)
    kparams = np.zeros((n, 3))
    cnode, ctag, cparams, ctemp = [], [], [], []
    for bath in network.baths:
        density = with_cutoff(bath.density, linear_cutoff)
        ktag[bath.node] = density.tag
        kparams[bath.node] = density.params
        cnode.append(bath.node)
        ctag.append(density.tag)
        cparams.append(density.params)
        ctemp.append(bath.temperature)
    return LangevinModel(
        potential=np.array(network.potential),
        kernel_tag=ktag,
        kernel_params=kparams,
        channel_node=np.array(cnode, dtype=np.int64),
        channel_tag=np.array(ctag, dtype=np.int64),
        channel_params=np.array(cparams),
        channel_temp=np.array(ctemp),
        label=network.label,
    )


def susceptibility(model: LangevinModel, omega) -> NDArray[np.complex128]:
    """A(w) for scalar or array w; (N, N) or (n, N, N) complex."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    n = model.n_nodes
    a = np.broadcast_to(model.potential.astype(complex), (w.size, n, n)).copy()
    idx = np.arange(n)
    a[:, idx, idx] -= w[:, None] ** 2
    for node in range(n):
        if model.kernel_tag[node] >= 0:
            a[:, node, node] -= kernels.kernel_dynamic(
                w, model.kernel_tag[node], model.kernel_params[node]
            )
    return a[0] if np.isscalar(omega) else a


@dataclass(frozen=True)
class StabilityReport:
    """Static spectrum plus a scan of |det A| along the real axis."""

    stable: bool
    static_eigenvalues: NDArray[np.float64]
    min_abs_det: float
    min_abs_det_omega: float


def stability_scan(
    model: LangevinModel, omega_max: float, samples: int = 4096
) -> StabilityReport:
    """Flag models whose coupled potential fails positive definiteness.

    A(0) equals the network potential, so instability is decided by its
    eigenvalues; the |det A(w)| scan documents how close the model comes to
    a real-axis resonance pole.
    """
    evals = np.linalg.eigvalsh(model.potential)
    grid = np.linspace(0.0, omega_max, samples)
    det = np.abs(np.linalg.det(susceptibility(model, grid)))
    k = int(np.argmin(det))
    return StabilityReport(
        stable=bool(evals[0] > 0),
        static_eigenvalues=evals,
        min_abs_det=float(det[k]),
        min_abs_det_omega=float(grid[k]),
    )


def _pair_lists(n: int):
    """XX/PP on ordered upper triangles, PX on every ordered off-pair."""
    pa, pb, pt = [], [], []
    for a in range(n):
        for b in range(a, n):
            pa.append(a), pb.append(b), pt.append(0)
    for a in range(n):
        for b in range(a, n):
            pa.append(a), pb.append(b), pt.append(2)
    for a in range(n):
        for b in range(n):
            if a != b:
                pa.append(a), pb.append(b), pt.append(1)
    return (
        np.array(pa, dtype=np.int64),
        np.array(pb, dtype=np.int64),
        np.array(pt, dtype=np.int64),
    )


def _breakpoints(model: LangevinModel) -> list[float]:
    """Initial panel edges: resonances, thermal scale, bath cutoffs.

    Cutoffs can sit many decades above the resonances, so the span up to
    the integration top is bridged with a geometric ladder; otherwise the
    first panels are too wide for the local rule to even see the peaks.
    """
    pts = {0.0}
    squares = np.linalg.eigvalsh(model.potential)
    pts.update(np.sqrt(np.abs(squares)).tolist())
    for tag, params in zip(model.channel_tag, model.channel_params):
        if tag == 0:
            pts.update((params[1], 2.0 * params[1]))
        elif tag == 1:
            g, w0 = params[0], params[2]
            pts.update((max(w0 - 0.5 * g, 0.0), w0, w0 + 0.5 * g))
    pts.add(8.0 * model.channel_temp.max())
    top = 2.0 * max(pts)
    pts.add(top)
    low = [p for p in pts if 0.0 < p < 0.1 * top]
    rung = max(low) if low else 0.25 * top
    while rung < 0.25 * top:
        rung *= 4.0
        pts.add(rung)
    return sorted(p for p in pts if 0.0 <= p <= top)


@dataclass(frozen=True)
class ExactStationaryResult:
    """Covariance, heat currents, and integration diagnostics in one pass."""

    covariance: CovarianceMatrix
    currents: HeatCurrentReport
    quadrature: QuadratureResult
    stationarity_residual: float


def exact_stationary(model: LangevinModel, rtol: float = 1e-8) -> ExactStationaryResult:
    """Integrate all stationary second moments of the model at once.

    Raises StabilityError for indefinite potentials, QuadratureError if
    the tolerance cannot be met or the dual heat-current expressions
    disagree beyond 10x the requested tolerance, and PhysicalityError if the
    assembled covariance violates the Heisenberg bound beyond 1e-6.
    """
    evals = np.linalg.eigvalsh(model.potential)
    if evals[0] <= 0:
        raise StabilityError(
            f"network potential indefinite (min eigenvalue {evals[0]:.3e}); "
            "no stationary state exists"
        )
    n = model.n_nodes
    pa, pb, pt = _pair_lists(n)

    def f(w):
        return kernels.ness_integrand(
            w,
            model.potential,
            model.kernel_tag,
            model.kernel_params,
            model.channel_node,
            model.channel_tag,
            model.channel_params,
            model.channel_temp,
            pa,
            pb,
            pt,
        )

    info = integrate_adaptive(
        f, _breakpoints(model), rtol, tail=TailRule(power=3.0)
    )

    xx = np.zeros((n, n))
    pp = np.zeros((n, n))
    px = np.zeros((n, n))
    for value, a, b, t in zip(info.value, pa, pb, pt):
        if t == 0:
            xx[a, b] = xx[b, a] = value
        elif t == 2:
            pp[a, b] = pp[b, a] = value
        else:
            px[a, b] = value

    cov = np.zeros((2 * n, 2 * n))
    cov[0::2, 0::2] = xx
    cov[1::2, 1::2] = pp
    for a in range(n):
        for b in range(n):
            if a != b:
                cov[2 * a + 1, 2 * b] = px[a, b]
                cov[2 * b, 2 * a + 1] = px[a, b]
    matrix = CovarianceMatrix(cov)
    if not is_physical(matrix, PHYSICALITY_SLACK):
        nu = symplectic_eigenvalues(matrix).min()
        raise PhysicalityError(
            f"exact covariance violates the Heisenberg bound: min nu = {nu:.9g}"
        )
    off = [(a, b) for a in range(n) for b in range(n) if a != b]
    residual = max((abs(px[a, b] + px[b, a]) for a, b in off), default=0.0)

    currents = _currents_from_px(model, px, info, rtol)
    return ExactStationaryResult(matrix, currents, info, residual)


def _currents_from_px(
    model: LangevinModel, px: NDArray, info: QuadratureResult, rtol: float
) -> HeatCurrentReport:
    """Boundary heat currents from mixed position-momentum covariances.

    Stationarity of the node energy at attached node a gives the bath input
    as the spring outflow sum_b V_ab <{P_a, X_b}>/2.  Every bath therefore
    gets an expression built from different integrand components, and the
    conservation residual sum(Q) is a real cross-check, enforced at 10x the
    quadrature tolerance with the per-component absolute floor included.
    """
    n = model.n_nodes
    nodes = tuple(int(v) for v in model.channel_node)
    currents = np.array(
        [
            sum(model.potential[a, b] * px[a, b] for b in range(n) if b != a)
            for a in nodes
        ]
    )
    coupling = np.abs(
        model.potential - np.diag(np.diag(model.potential))
    ).max()
    floor = 1e-6 * coupling * np.abs(info.value).max()
    threshold = 10.0 * rtol * max(np.abs(currents).max(), floor)
    if n > 1 and abs(currents.sum()) > threshold:
        raise QuadratureError(
            "exact heat-current expressions violate conservation beyond "
            "10x the quadrature tolerance",
            {
                "currents": currents,
                "conservation": currents.sum(),
                "threshold": threshold,
            },
        )
    return HeatCurrentReport(
        method="exact",
        bath_nodes=nodes,
        currents=currents,
        conservation_residual=float(currents.sum()),
        extras={"conservation_threshold": float(threshold)},
    )


def exact_steady_covariance(
    model: LangevinModel, rtol: float = 1e-8
) -> tuple[CovarianceMatrix, QuadratureResult]:
    """Stationary covariance alone; see exact_stationary for the full pass."""
    result = exact_stationary(model, rtol)
    return result.covariance, result.quadrature


def exact_heat_currents(model: LangevinModel, rtol: float = 1e-8) -> HeatCurrentReport:
    """Stationary per-bath currents alone; shares panels with the covariances."""
    return exact_stationary(model, rtol).currents
