"""numba @njit twins of the numpy_impl kernels.

Same flat signatures and tag encoding as numpy_impl; see that module for
the semantics.  Compilation is lazy and cached on disk, so the first call
in a fresh environment pays the JIT cost once.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_INV_PI = 1.0 / math.pi


@njit(cache=True)
def _j_over_omega_one(w, tag, g, p1, p2):
    if tag == 0:
        cut2 = p1 * p1
        return g * cut2 / (w * w + cut2)
    if tag == 1:
        d = w * w - p2 * p2
        return g * p1 * p1 / (g * g * w * w + d * d)
    return g


@njit(cache=True)
def _omega_coth_one(w, temperature):
    x = w / (2.0 * temperature)
    if abs(x) < 1e-8:
        return 2.0 * temperature * (1.0 + x * x / 3.0)
    return w / math.tanh(x)


@njit(cache=True)
def _kernel_dynamic_one(w, tag, g, p1, p2):
    if tag == 0:
        return complex(0.0, g * p1 * w) / complex(p1, -w)
    # tag 1: underdamped
    return (
        complex(w * w, g * w)
        * (p1 * p1)
        / (p2 * p2 * complex(p2 * p2 - w * w, -g * w))
    )


@njit(cache=True)
def bath_integrand(omega, tag, params, temperature, t, integrated):
    out = np.empty((2, omega.size))
    g, p1, p2 = params[0], params[1], params[2]
    for k in range(omega.size):
        w = omega[k]
        jw = _j_over_omega_one(w, tag, g, p1, p2)
        wc = _omega_coth_one(w, temperature)
        x = w * t
        if integrated:
            if abs(x) < 1e-8:
                sinc = 1.0 - x * x / 6.0
            else:
                sinc = math.sin(x) / x
            half = math.sin(0.5 * x)
            out[0, k] = _INV_PI * jw * wc * t * sinc
            out[1, k] = -_INV_PI * jw * 2.0 * half * half
        else:
            out[0, k] = _INV_PI * jw * wc * math.cos(x)
            out[1, k] = -_INV_PI * jw * w * math.sin(x)
    return out


@njit(cache=True)
def _invert_into(a, inv, n):
    if n == 1:
        inv[0, 0] = 1.0 / a[0, 0]
    elif n == 2:
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        inv[0, 0] = a[1, 1] / det
        inv[1, 1] = a[0, 0] / det
        inv[0, 1] = -a[0, 1] / det
        inv[1, 0] = -a[1, 0] / det
    else:
        c00 = a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
        c01 = a[1, 2] * a[2, 0] - a[1, 0] * a[2, 2]
        c02 = a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]
        c10 = a[0, 2] * a[2, 1] - a[0, 1] * a[2, 2]
        c11 = a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
        c12 = a[0, 1] * a[2, 0] - a[0, 0] * a[2, 1]
        c20 = a[0, 1] * a[1, 2] - a[0, 2] * a[1, 1]
        c21 = a[0, 2] * a[1, 0] - a[0, 0] * a[1, 2]
        c22 = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        det = a[0, 0] * c00 + a[0, 1] * c01 + a[0, 2] * c02
        inv[0, 0] = c00 / det
        inv[0, 1] = c10 / det
        inv[0, 2] = c20 / det
        inv[1, 0] = c01 / det
        inv[1, 1] = c11 / det
        inv[1, 2] = c21 / det
        inv[2, 0] = c02 / det
        inv[2, 1] = c12 / det
        inv[2, 2] = c22 / det


@njit(cache=True)
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
    n_nodes = potential.shape[0]
    n_pairs = pair_a.size
    out = np.empty((n_pairs, omega.size))
    a = np.empty((n_nodes, n_nodes), dtype=np.complex128)
    inv = np.empty((n_nodes, n_nodes), dtype=np.complex128)
    acc = np.empty(n_pairs, dtype=np.complex128)
    for k in range(omega.size):
        w = omega[k]
        for i in range(n_nodes):
            for j in range(n_nodes):
                a[i, j] = potential[i, j]
            a[i, i] -= w * w
            if ktag[i] >= 0:
                a[i, i] -= _kernel_dynamic_one(
                    w, ktag[i], kparams[i, 0], kparams[i, 1], kparams[i, 2]
                )
        _invert_into(a, inv, n_nodes)

        for i in range(n_pairs):
            acc[i] = 0.0 + 0.0j
        for c in range(cnode.size):
            node = cnode[c]
            weight = _j_over_omega_one(
                w, ctag[c], cparams[c, 0], cparams[c, 1], cparams[c, 2]
            ) * _omega_coth_one(w, ctemp[c])
            for i in range(n_pairs):
                acc[i] += weight * inv[pair_a[i], node] * np.conj(inv[pair_b[i], node])

        for i in range(n_pairs):
            if pair_type[i] == 0:
                out[i, k] = _INV_PI * acc[i].real
            elif pair_type[i] == 1:
                out[i, k] = _INV_PI * w * acc[i].imag
            else:
                out[i, k] = _INV_PI * w * w * acc[i].real
    return out
