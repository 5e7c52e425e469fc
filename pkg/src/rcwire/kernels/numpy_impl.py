"""Vectorized numpy implementations of the hot integrand kernels.

These are the reference semantics for the numba twins in numba_impl; both
must agree to near machine precision (tested).  Spectral-density variants
are encoded as integer tags so the same flat signature works under numba:

    tag 0: ohmic-algebraic   J = g L^2 w / (w^2 + L^2),   params (g, L, -)
    tag 1: underdamped       J = g l^2 w / (g^2 w^2 + (w^2 - w0^2)^2),
                             params (g, l, w0)
    tag 2: ohmic-linear      J = g w,                     params (g, -, -)

Everything is expressed through J(w)/w, which has a finite closed form at
w = 0 for all variants, and through w*coth(w/2T), whose w -> 0 limit 2T is
substituted analytically below x = 1e-8; no integrand ever divides by w.
"""
from __future__ import annotations

import numpy as np

_INV_PI = 1.0 / np.pi


def j_over_omega(omega, tag, params):
    """J(w)/w, finite at w = 0 for every variant."""
    g = params[0]
    if tag == 0:
        cut2 = params[1] * params[1]
        return g * cut2 / (omega * omega + cut2)
    if tag == 1:
        l2 = params[1] * params[1]
        d = omega * omega - params[2] * params[2]
        return g * l2 / (g * g * omega * omega + d * d)
    if tag == 2:
        return np.full_like(np.asarray(omega, dtype=float), g)
    raise ValueError(f"unknown spectral tag {tag}")


def omega_coth(omega, temperature):
    """w * coth(w / 2T), with the analytic limit 2T below x = 1e-8."""
    x = omega / (2.0 * temperature)
    safe = np.where(np.abs(x) < 1e-8, 1.0, x)
    out = omega / np.tanh(safe)
    return np.where(np.abs(x) < 1e-8, 2.0 * temperature * (1.0 + x * x / 3.0), out)


def kernel_fourier(omega, tag, params):
    """Fourier-domain dissipation kernel chi(w); Im chi = J on w > 0."""
    omega = np.asarray(omega, dtype=float)
    g = params[0]
    if tag == 0:
        cut = params[1]
        return g * cut * cut / (cut - 1j * omega)
    if tag == 1:
        l2 = params[1] * params[1]
        w0sq = params[2] * params[2]
        return l2 / (w0sq - 1j * g * omega - omega * omega)
    raise ValueError(f"no closed-form kernel for spectral tag {tag}")


def kernel_dynamic(omega, tag, params):
    """Dynamic kernel part chi(w) - chi(0), subtracted analytically.

    chi(0) is the renormalisation counter-term, which for wide cutoffs dwarfs
    every other stiffness scale; forming chi(w) and the counter-term
    separately would cancel them in floating point at a cost of
    eps * chi(0) absolute noise on the stiffness diagonal.  The subtracted
    closed forms below never contain the large value at all.  Im part equals
    J on w > 0 unchanged, and the w -> 0 limit is exactly zero.
    """
    omega = np.asarray(omega, dtype=float)
    g = params[0]
    if tag == 0:
        cut = params[1]
        return 1j * g * cut * omega / (cut - 1j * omega)
    if tag == 1:
        l2 = params[1] * params[1]
        w0sq = params[2] * params[2]
        num = l2 * (omega * omega + 1j * g * omega)
        return num / (w0sq * (w0sq - 1j * g * omega - omega * omega))
    raise ValueError(f"no closed-form kernel for spectral tag {tag}")


def bath_integrand(omega, tag, params, temperature, t, integrated):
    """(2, n) real/imag integrand of the bath correlation at lag t.

    mode integrated=0:  (1/pi) J [coth cos(wt), -sin(wt)]
    mode integrated=1:  its running time integral, i.e. the same with
                        cos -> sin(wt)/w and sin -> (1 - cos(wt))/w.
    """
    omega = np.asarray(omega, dtype=float)
    jw = j_over_omega(omega, tag, params)
    wc = omega_coth(omega, temperature)
    x = omega * t
    out = np.empty((2, omega.size))
    if integrated:
        xs = np.where(np.abs(x) < 1e-8, 1.0, x)
        sinc = np.where(np.abs(x) < 1e-8, 1.0 - x * x / 6.0, np.sin(xs) / xs)
        half = np.sin(0.5 * x)
        out[0] = _INV_PI * jw * wc * t * sinc
        out[1] = -_INV_PI * jw * 2.0 * half * half
    else:
        out[0] = _INV_PI * jw * wc * np.cos(x)
        out[1] = -_INV_PI * jw * omega * np.sin(x)
    return out


def _batched_inverse(a):
    """Closed-form adjugate inverse for stacked 1x1 / 2x2 / 3x3 matrices."""
    n = a.shape[1]
    if n == 1:
        return 1.0 / a
    if n == 2:
        det = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
        inv = np.empty_like(a)
        inv[:, 0, 0] = a[:, 1, 1]
        inv[:, 1, 1] = a[:, 0, 0]
        inv[:, 0, 1] = -a[:, 0, 1]
        inv[:, 1, 0] = -a[:, 1, 0]
        return inv / det[:, None, None]
    if n == 3:
        c00 = a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1]
        c01 = a[:, 1, 2] * a[:, 2, 0] - a[:, 1, 0] * a[:, 2, 2]
        c02 = a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0]
        c10 = a[:, 0, 2] * a[:, 2, 1] - a[:, 0, 1] * a[:, 2, 2]
        c11 = a[:, 0, 0] * a[:, 2, 2] - a[:, 0, 2] * a[:, 2, 0]
        c12 = a[:, 0, 1] * a[:, 2, 0] - a[:, 0, 0] * a[:, 2, 1]
        c20 = a[:, 0, 1] * a[:, 1, 2] - a[:, 0, 2] * a[:, 1, 1]
        c21 = a[:, 0, 2] * a[:, 1, 0] - a[:, 0, 0] * a[:, 1, 2]
        c22 = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
        det = a[:, 0, 0] * c00 + a[:, 0, 1] * c01 + a[:, 0, 2] * c02
        inv = np.empty_like(a)
        inv[:, 0, 0], inv[:, 0, 1], inv[:, 0, 2] = c00, c10, c20
        inv[:, 1, 0], inv[:, 1, 1], inv[:, 1, 2] = c01, c11, c21
        inv[:, 2, 0], inv[:, 2, 1], inv[:, 2, 2] = c02, c12, c22
        return inv / det[:, None, None]
    raise ValueError("kernels support models with at most 3 nodes")


def ness_integrand(
    omega,
    potential,
    ktag,
    kparams,
    cnode,
    ctag,
    cparams,
    ctemp,
    pair_a,
    pair_b,
    pair_type,
):
    """Stationary Langevin covariance integrands, one row per requested entry.

    Builds A(w) = potential - w^2 - diag(chi_a(w) - chi_a(0)), with the
    counter-term folded into the subtracted kernel, inverts it in closed
    form and contracts against each thermal noise channel.  Entry types: 0
    gives the XX integrand Re M_ab / pi, 1 the PX integrand w Im M_ab / pi,
    and 2 the PP integrand w^2 Re M_ab / pi, where

        M_ab(w) = sum_c coth(w/2T_c) Im chi_c(w) [A^-1]_ac [A^-1]*_bc.
    """
    omega = np.asarray(omega, dtype=float)
    n_nodes = potential.shape[0]
    a = np.broadcast_to(
        potential.astype(complex), (omega.size, n_nodes, n_nodes)
    ).copy()
    idx = np.arange(n_nodes)
    a[:, idx, idx] -= omega[:, None] ** 2
    for alpha in range(n_nodes):
        if ktag[alpha] >= 0:
            a[:, alpha, alpha] -= kernel_dynamic(omega, ktag[alpha], kparams[alpha])
    inv = _batched_inverse(a)

    m = np.zeros((pair_a.size, omega.size), dtype=complex)
    for c in range(cnode.size):
        node = cnode[c]
        weight = j_over_omega(omega, ctag[c], cparams[c]) * omega_coth(
            omega, ctemp[c]
        )
        cols = inv[:, :, node]
        for i in range(pair_a.size):
            m[i] += weight * cols[:, pair_a[i]] * np.conj(cols[:, pair_b[i]])

    out = np.empty((pair_a.size, omega.size))
    for i in range(pair_a.size):
        if pair_type[i] == 0:
            out[i] = _INV_PI * m[i].real
        elif pair_type[i] == 1:
            out[i] = _INV_PI * omega * m[i].imag
        else:
            out[i] = _INV_PI * omega * omega * m[i].real
    return out
