"""Backend selection for the state-vector kernels.

The compiled extension is preferred. Setting ``QKDLAB_PURE_PYTHON=1`` forces
the numpy implementation, which is also used when the extension failed to
build.
"""

import os

from . import _kernels_py

if os.environ.get("QKDLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def _bind(impl):
    global apply_matrix, apply_controlled, marginal_probs, collapse
    apply_matrix = impl.apply_matrix
    apply_controlled = impl.apply_controlled
    marginal_probs = impl.marginal_probs
    collapse = impl.collapse


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def set_backend(name: str) -> str:
    """Rebind the kernels to ``name`` ("cython" or "python"); returns the previous backend."""
    global BACKEND
    if name == "python":
        impl = _kernels_py
    elif name == "cython":
        from . import _ckernels as impl
    else:
        raise ValueError(f"unknown backend {name!r}")
    previous, BACKEND = BACKEND, name
    _bind(impl)
    return previous


_bind(_impl)

__all__ = ["BACKEND", "apply_matrix", "apply_controlled", "marginal_probs", "collapse",
           "available_backends", "set_backend"]
