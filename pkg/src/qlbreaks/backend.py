"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python module
is the fallback.  ``QLBREAKS_BACKEND`` (``c`` or ``python``) forces a choice
at import time, and :func:`use_backend` switches at runtime (used by the
equivalence tests and the benchmark).
"""

from __future__ import annotations

import contextlib
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["c"] = _ckernels


def _initial():
    forced = os.environ.get("QLBREAKS_BACKEND")
    if forced:
        forced = forced.lower()
        if forced not in _BACKENDS:
            raise ImportError(
                f"QLBREAKS_BACKEND={forced!r} requested but that backend is "
                f"unavailable (have: {sorted(_BACKENDS)})"
            )
        return _BACKENDS[forced]
    return _BACKENDS.get("c", _pykernels)


_active = _initial()


def kernels():
    """The active kernel module."""
    return _active


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def active_backend_name() -> str:
    return _active.BACKEND_NAME


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch the active kernel backend."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable (have: {sorted(_BACKENDS)})")
    prev = _active
    _active = _BACKENDS[name]
    try:
        yield _active
    finally:
        _active = prev
