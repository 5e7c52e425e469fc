"""Covariance toolkit: symplectic spectra, physicality, Uhlmann fidelity.

The fidelity anchors were frozen from an independent density-matrix oracle:
thermal states built as expm(-H/T)/Z in a truncated Fock basis (N = 160,
converged to ~1e-11) with F = (tr sqrt(sqrt(r1) r2 sqrt(r1)))^2, and
two-mode squeezed states via the closed-form pure-state overlap.
"""

import math

import numpy as np
import pytest

from rcwire.errors import ConditioningError, PhysicalityError
from rcwire.gaussian import (
    CovarianceMatrix,
    is_physical,
    reduce_modes,
    require_physical,
    symplectic_eigenvalues,
    symplectic_form,
    uhlmann_fidelity,
)


def thermal_cov(w, temperature):
    c = 1.0 / math.tanh(w / (2.0 * temperature))
    return CovarianceMatrix(np.diag([c / (2.0 * w), 0.5 * w * c]))


def two_mode_squeezed_cov(r):
    c2, s2 = math.cosh(2.0 * r), math.sinh(2.0 * r)
    return CovarianceMatrix(
        0.5
        * np.array(
            [
                [c2, 0.0, s2, 0.0],
                [0.0, c2, 0.0, -s2],
                [s2, 0.0, c2, 0.0],
                [0.0, -s2, 0.0, c2],
            ]
        )
    )


def random_symplectic(rng, n_modes):
    """Product of rotations, local squeezes, and neighbour beamsplitters."""
    dim = 2 * n_modes
    s = np.eye(dim)
    for j in range(n_modes):
        th = rng.uniform(0.0, 2.0 * np.pi)
        r = rng.uniform(-0.8, 0.8)
        block = np.array(
            [[np.cos(th), np.sin(th)], [-np.sin(th), np.cos(th)]]
        ) @ np.diag([np.exp(r), np.exp(-r)])
        full = np.eye(dim)
        full[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = block
        s = full @ s
    for j in range(n_modes - 1):
        th = rng.uniform(0.0, 2.0 * np.pi)
        c, sn = np.cos(th), np.sin(th)
        full = np.eye(dim)
        for a, b in ((2 * j, 2 * j + 2), (2 * j + 1, 2 * j + 3)):
            full[a, a] = c
            full[a, b] = sn
            full[b, a] = -sn
            full[b, b] = c
        s = full @ s
    return s


def test_vacuum_and_thermal_symplectic_spectra():
    vac = CovarianceMatrix.vacuum(3)
    assert np.allclose(vac.data, 0.5 * np.eye(6))
    assert np.allclose(symplectic_eigenvalues(vac), 0.5)
    assert is_physical(vac)

    w, temperature = 1.3, 0.9
    nu = symplectic_eigenvalues(thermal_cov(w, temperature))
    expected = 0.5 / math.tanh(w / (2.0 * temperature))
    assert abs(nu[0] - expected) < 1e-13


def test_symplectic_form_and_transform_invariance():
    theta = symplectic_form(2)
    assert np.allclose(theta, -theta.T)
    rng = np.random.default_rng(411)
    for _ in range(25):
        n = int(rng.integers(1, 4))
        s = random_symplectic(rng, n)
        th = symplectic_form(n)
        assert np.allclose(s @ th @ s.T, th, atol=1e-12)
        nus = np.sort(rng.uniform(0.5, 3.0, n))
        cov = CovarianceMatrix(s @ np.diag(np.repeat(nus, 2)) @ s.T)
        assert is_physical(cov)
        assert np.allclose(symplectic_eigenvalues(cov), nus, atol=1e-9)


def test_fidelity_thermal_same_frequency_anchor():
    f = uhlmann_fidelity(thermal_cov(1.0, 1.2), thermal_cov(1.0, 0.7))
    assert abs(f - 0.937218846526003) < 1e-9


def test_fidelity_thermal_distinct_frequency_anchor():
    f = uhlmann_fidelity(thermal_cov(1.0, 1.2), thermal_cov(1.6, 0.9))
    assert abs(f - 0.851379305469777) < 1e-9


def test_fidelity_two_mode_squeezed_anchors():
    # pure states sit on the physicality boundary where the mixed-state
    # formula's intermediates degenerate; ~1e-8 is conditioning, not bias
    f = uhlmann_fidelity(two_mode_squeezed_cov(0.4), two_mode_squeezed_cov(0.9))
    assert abs(f - 0.786447732965928) < 1e-6
    f0 = uhlmann_fidelity(CovarianceMatrix.vacuum(2), two_mode_squeezed_cov(0.6))
    assert abs(f0 - 0.711577762587223) < 1e-12


def test_fidelity_properties():
    rng = np.random.default_rng(902)
    for _ in range(15):
        n = int(rng.integers(1, 3))
        s = random_symplectic(rng, n)
        nu_a = np.sort(rng.uniform(0.5, 2.0, n))
        nu_b = np.sort(rng.uniform(0.5, 2.0, n))
        a = CovarianceMatrix(s @ np.diag(np.repeat(nu_a, 2)) @ s.T)
        b = CovarianceMatrix(s @ np.diag(np.repeat(nu_b, 2)) @ s.T)
        fab, fba = uhlmann_fidelity(a, b), uhlmann_fidelity(b, a)
        assert 0.0 < fab <= 1.0
        assert abs(fab - fba) < 1e-9
        assert uhlmann_fidelity(a, a) >= 1.0 - 1e-12
        # fidelity is symplectically invariant
        t = random_symplectic(rng, n)
        at = CovarianceMatrix(t @ a.data @ t.T)
        bt = CovarianceMatrix(t @ b.data @ t.T)
        assert abs(uhlmann_fidelity(at, bt) - fab) < 1e-9


def test_reduce_modes_products_and_entanglement():
    a, b = thermal_cov(1.0, 1.5), thermal_cov(2.0, 0.6)
    prod = CovarianceMatrix(
        np.block(
            [[a.data, np.zeros((2, 2))], [np.zeros((2, 2)), b.data]]
        )
    )
    assert np.allclose(reduce_modes(prod, (1,)).data, b.data)
    assert np.allclose(reduce_modes(prod, (0, 1)).data, prod.data)
    # tracing half of a two-mode squeezed state leaves a thermal mode
    r = 0.7
    nu = symplectic_eigenvalues(reduce_modes(two_mode_squeezed_cov(r), (0,)))
    assert abs(nu[0] - 0.5 * math.cosh(2.0 * r)) < 1e-12
    with pytest.raises(ValueError, match="invalid mode selection"):
        reduce_modes(prod, (0, 2))


def test_physicality_detection_and_enforcement():
    bad = CovarianceMatrix(0.4 * np.eye(2))
    assert not is_physical(bad)
    with pytest.raises(PhysicalityError, match="trajectory step"):
        require_physical(bad, 1e-9, "trajectory step")
    # fidelity refuses unphysical inputs beyond its slack
    with pytest.raises(PhysicalityError):
        uhlmann_fidelity(bad, CovarianceMatrix.vacuum(1))


def test_covariance_construction_errors():
    with pytest.raises(ValueError, match="2N x 2N"):
        CovarianceMatrix(np.eye(3))
    with pytest.raises(ValueError, match="not symmetric"):
        CovarianceMatrix(np.array([[1.0, 0.2], [0.1, 1.0]]))
    with pytest.raises(ValueError, match="equal mode counts"):
        uhlmann_fidelity(CovarianceMatrix.vacuum(1), CovarianceMatrix.vacuum(2))
