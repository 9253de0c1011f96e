"""Backend selection for the propagation hot loop.

The compiled extension is used when it imports; otherwise the numpy fallback
takes over. Setting ``DRESSMAG_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _fallback

try:
    if os.environ.get("DRESSMAG_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("compiled kernels disabled by environment")
    from . import _kernels as _active

    BACKEND = "compiled"
except ImportError:
    _active = _fallback
    BACKEND = "numpy"

eigh4 = _active.eigh4
expm4 = _active.expm4
evolve = _active.evolve

__all__ = ["BACKEND", "eigh4", "expm4", "evolve"]
