"""Kernel backend selection.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
pure-Python ``_pykernels`` takes over. Setting ``PERCHKIT_PURE_PYTHON=1``
forces the fallback.
"""

import importlib
import os

from . import _pykernels


def _select():
    if os.environ.get("PERCHKIT_PURE_PYTHON", "") not in ("", "0"):
        return _pykernels, "python"
    try:
        mod = importlib.import_module("perchkit._ckernels")
    except ImportError:
        return _pykernels, "python"
    return mod, "cython"


backend, BACKEND = _select()

FULL_AERO = _pykernels.FULL_AERO
DESIGN_AERO = _pykernels.DESIGN_AERO
N_LOADS = _pykernels.N_LOADS
K_LIMIT = _pykernels.K_LIMIT

stall = backend.stall
wing_full = backend.wing_full
lift_reduced = backend.lift_reduced
drag_reduced = backend.drag_reduced
loads = backend.loads
derivative = backend.derivative
euler = backend.euler
eta = backend.eta
trim_alpha = backend.trim_alpha


def get_backend(name):
    """Return the kernel module called ``name`` (``"python"`` or ``"cython"``)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("perchkit._ckernels")
    raise ValueError(f"unknown backend {name!r}")
