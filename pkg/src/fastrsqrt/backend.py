"""Selects the compiled core when it is importable, else the numpy fallback."""

from __future__ import annotations

from types import ModuleType

from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_active: ModuleType = _core if _core is not None else _fallback


def available() -> list[str]:
    return (["core"] if _core is not None else []) + ["fallback"]


def name() -> str:
    return "core" if _active is _core else "fallback"


def get() -> ModuleType:
    return _active


def use(which: str) -> None:
    """Switch backend globally (``"core"`` or ``"fallback"``)."""
    global _active
    if which == "core":
        if _core is None:
            raise RuntimeError("compiled core is not available in this build")
        _active = _core
    elif which == "fallback":
        _active = _fallback
    else:
        raise ValueError(f"unknown backend {which!r}")
