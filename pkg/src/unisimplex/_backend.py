"""Select the batch kernel implementation at import time.

The compiled ``_kernels`` extension is preferred; the numpy module is used
when the extension was not built. :func:`set_backend` switches explicitly,
which the benchmarks and parity tests rely on.
"""

from __future__ import annotations

import importlib
from types import ModuleType

_MODULES = {"cython": "unisimplex._kernels", "python": "unisimplex._kernels_py"}


def _load(name: str) -> ModuleType:
    return importlib.import_module(_MODULES[name])


def available_backends() -> list[str]:
    found = []
    for name in _MODULES:
        try:
            _load(name)
        except ImportError:
            continue
        found.append(name)
    return found


try:
    kernels = _load("cython")
    BACKEND = "cython"
except ImportError:
    kernels = _load("python")
    BACKEND = "python"


def get_kernels(name: str | None = None) -> ModuleType:
    """Kernel module for ``name``, or the active one when ``name`` is None."""
    if name is None:
        return kernels
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(_MODULES)}")
    return _load(name)


def set_backend(name: str) -> str:
    """Make ``name`` the active backend and return the previous one."""
    global kernels, BACKEND
    mod = get_kernels(name)
    previous = BACKEND
    kernels, BACKEND = mod, name
    return previous
