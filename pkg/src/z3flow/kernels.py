"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
reference runs. Set ``Z3FLOW_KERNELS=python`` to force the fallback.
"""
import os

from . import _kernels_py

SOLVE = _kernels_py.SOLVE
COUNT = _kernels_py.COUNT

_compiled = None
if os.environ.get("Z3FLOW_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _kernels_py


def backend(name=None):
    """Return the kernel module for ``name`` ('compiled', 'python') or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def have_compiled():
    return _compiled is not None


def orient_search(n, eu, ev, res0, need, mode, limit=0):
    return _impl.orient_search(n, eu, ev, res0, need, mode, limit)


def cut_scan(n, eu, ev, kmax):
    return _impl.cut_scan(n, eu, ev, kmax)
