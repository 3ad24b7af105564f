"""Kernel backend selection.

The hot path (resistance assembly + 6x6 solve inside the RK4 loop) exists
twice: a Cython extension (``_core``) and a pure-NumPy fallback
(``_reference``). By default the compiled backend is used when importable.
Set SCALLOP_PAIR_BACKEND to "python" or "compiled" to force one; forcing
"compiled" raises if the extension was not built.
"""

from __future__ import annotations

import os

_CACHE: dict = {}


def get_backend(name: str | None = None):
    """Return a kernel module by name ("python", "compiled", or "auto")."""
    if name in (None, "", "auto"):
        try:
            return get_backend("compiled")
        except ImportError:
            return get_backend("python")
    if name in _CACHE:
        return _CACHE[name]
    if name == "python":
        from . import _reference as mod
    elif name == "compiled":
        from . import _core as mod  # type: ignore[attr-defined]
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    _CACHE[name] = mod
    return mod


def available_backends() -> tuple[str, ...]:
    names = ["python"]
    try:
        get_backend("compiled")
        names.insert(0, "compiled")
    except ImportError:
        pass
    return tuple(names)


kernel = get_backend(os.environ.get("SCALLOP_PAIR_BACKEND"))


def backend_name() -> str:
    return kernel.BACKEND_NAME
