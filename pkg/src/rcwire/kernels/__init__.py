"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import from the RCWIRE_KERNELS environment
variable: "numba" requires numba and fails loudly without it, "numpy"
forces the vectorized fallback, and the default "auto" takes numba when it
imports and numpy otherwise.  Both implementations are importable directly
(rcwire.kernels.numpy_impl / .numba_impl) for equivalence tests and for
benchmarks/kernel_benchmark.py.
"""
from __future__ import annotations

import os

from . import numpy_impl

_requested = os.environ.get("RCWIRE_KERNELS", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"RCWIRE_KERNELS={_requested!r}: expected 'auto', 'numba' or 'numpy'"
    )

if _requested == "numpy":
    _impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = numpy_impl
        BACKEND = "numpy"

bath_integrand = _impl.bath_integrand
ness_integrand = _impl.ness_integrand

# closed forms with no hot path; always the numpy versions
j_over_omega = numpy_impl.j_over_omega
omega_coth = numpy_impl.omega_coth
kernel_fourier = numpy_impl.kernel_fourier
kernel_dynamic = numpy_impl.kernel_dynamic


def backend_name() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return BACKEND
