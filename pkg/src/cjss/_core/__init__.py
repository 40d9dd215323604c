"""Numeric kernel backends.

The compiled extension is preferred when it imported cleanly; the numpy
fallback is always available.  ``CJSS_BACKEND=python`` or ``=c`` forces a
choice (forcing ``c`` raises if the extension is missing).
"""
from __future__ import annotations

import os
from types import ModuleType

from . import numpy_backend
from .arrays import ProblemArrays, problem_arrays

try:
    from . import _speedups
except ImportError:
    _speedups = None


def available_backends() -> list[str]:
    names = ["python"]
    if _speedups is not None:
        names.insert(0, "c")
    return names


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        name = os.environ.get("CJSS_BACKEND", "").lower() or None
    if name is None:
        return _speedups if _speedups is not None else numpy_backend
    if name == "python":
        return numpy_backend
    if name == "c":
        if _speedups is None:
            raise RuntimeError(
                "compiled backend requested via CJSS_BACKEND=c but the "
                "extension is not built; run pip install -e . first"
            )
        return _speedups
    raise ValueError(f"unknown backend {name!r}; choose 'c' or 'python'")


DEFAULT = get_backend()

__all__ = [
    "DEFAULT",
    "ProblemArrays",
    "available_backends",
    "get_backend",
    "numpy_backend",
    "problem_arrays",
]
