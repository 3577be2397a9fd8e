"""Kernel backend selection.

The compiled extension is used when importable; set
``SUBBAND_ERROR_BACKEND=python`` to force the NumPy fallback.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

from . import _fallback

_NAMES = ("conv_decimate", "dd_conv_decimate", "dd_fft", "f1_enumerate")


def _namespace(module, name):
    return SimpleNamespace(name=name, **{k: getattr(module, k) for k in _NAMES})


python_backend = _namespace(_fallback, "python")

try:
    from . import _kernels
except ImportError:  # pragma: no cover - depends on build
    compiled_backend = None
else:
    compiled_backend = _namespace(_kernels, "compiled")


def available() -> list[str]:
    return ["python"] + (["compiled"] if compiled_backend is not None else [])


def get(name: str | None = None):
    if name is None:
        name = os.environ.get("SUBBAND_ERROR_BACKEND", "auto")
    if name == "python":
        return python_backend
    if name == "compiled":
        if compiled_backend is None:
            raise ImportError("compiled kernels are not built")
        return compiled_backend
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    return compiled_backend or python_backend


active = get()
