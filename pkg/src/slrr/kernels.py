"""Backend selection for the hot kernels.

The compiled extension is used when it was built and ``SLRR_PURE_PYTHON`` is
not set; otherwise the numpy fallback is used.  Both expose the same API.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

AVAILABLE = ("cython", "python") if _kernels_c is not None else ("python",)


def get_backend(name=None):
    """Return the kernel module for ``name`` ("cython" or "python").

    ``None`` selects the default backend for this process.
    """
    if name is None:
        return backend
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _kernels_c is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _kernels_c
    raise ValueError(f"unknown kernel backend {name!r}")


def _default():
    if os.environ.get("SLRR_PURE_PYTHON", "") not in ("", "0") or _kernels_c is None:
        return _kernels_py
    return _kernels_c


backend = _default()
BACKEND = "cython" if backend is _kernels_c else "python"

tangent_factors = backend.tangent_factors
euclidean_factors = backend.euclidean_factors
gram_from_factors = backend.gram_from_factors
quad_form_sum = backend.quad_form_sum
gradient = backend.gradient
