"""Kernel backend selection: compiled extension with pure-numpy fallback.

``STRICHARTZLAB_PURE_PYTHON=1`` forces the fallback (useful for the backend
benchmark and for environments without a C compiler).
"""

import os

from . import _kernels_py

if os.environ.get("STRICHARTZLAB_PURE_PYTHON", "").strip() in {"1", "true", "yes"}:
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

bessel_j_scalar = _impl.bessel_j_scalar
bessel_j_array = _impl.bessel_j_array
series_peak_log = _impl.series_peak_log


def get_backend(name=None):
    """Return a kernel module by name ('compiled' | 'python' | None=active)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels  # raises ImportError if not built

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
