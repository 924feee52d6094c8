"""Backend selection for the link-budget kernels.

The compiled extension is used when importable; otherwise the NumPy fallback.
Set ``CONVERGE_SIM_KERNELS=python`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("CONVERGE_SIM_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

received_power_matrix = _impl.received_power_matrix
best_per_tier = _impl.best_per_tier
band_interference_excluding = _impl.band_interference_excluding
cochannel_interference = _impl.cochannel_interference

__all__ = [
    "BACKEND",
    "received_power_matrix",
    "best_per_tier",
    "band_interference_excluding",
    "cochannel_interference",
]
