"""Kernel backend selection.

Imports the compiled Cython module when available and falls back to the
pure-Python implementations otherwise.  Set ``LUNASIL_PURE=1`` in the
environment to force the fallback (used by the benchmark and the
backend-equivalence tests).
"""

import os

from . import _pure

if os.environ.get("LUNASIL_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
adev_sums = _impl.adev_sums
madev_sums = _impl.madev_sums
lag_sq_sums = _impl.lag_sq_sums
thermal_transient = _impl.thermal_transient
