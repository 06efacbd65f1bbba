"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``GLOTTKIT_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the pure-Python versions are used. ``BACKEND`` names the
active one.
"""
import os

from . import _kernels_py

_force_py = os.environ.get("GLOTTKIT_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

levinson = _impl.levinson
allpole = _impl.allpole
allzero = _impl.allzero
leaky_integrate = _impl.leaky_integrate
root_power_sums = _impl.root_power_sums
run_lengths_circular = _impl.run_lengths_circular

__all__ = [
    "BACKEND",
    "levinson",
    "allpole",
    "allzero",
    "leaky_integrate",
    "root_power_sums",
    "run_lengths_circular",
]
