"""Selects the compiled kernels when built, else the numpy fallback.

Callers go through the module attributes (``kernels.power_iterate``) so that
:func:`use_backend` takes effect everywhere.
"""
from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKEND = "python"
power_iterate = _kernels_py.power_iterate
grid_max_2x2 = _kernels_py.grid_max_2x2


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _compiled is not None else [])


def use_backend(name: str) -> None:
    global BACKEND, power_iterate, grid_max_2x2
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        mod = _compiled
    elif name == "python":
        mod = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    power_iterate = mod.power_iterate
    grid_max_2x2 = mod.grid_max_2x2


if _compiled is not None:
    use_backend("cython")
