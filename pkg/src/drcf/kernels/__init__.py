"""Backend selection for the numeric hot kernels.

The jitted path is the default; set ``DRCF_DISABLE_NUMBA=1`` to force the
pure-numpy fallback (also used automatically when numba fails to import).
"""

import os

_disable = os.environ.get("DRCF_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

if not _disable:
    try:
        from . import _numba as _backend

        BACKEND = "numba"
    except ImportError:
        from . import _numpy as _backend

        BACKEND = "numpy"
else:
    from . import _numpy as _backend

    BACKEND = "numpy"

bmu_index = _backend.bmu_index
bmu_batch = _backend.bmu_batch
som_train_steps = _backend.som_train_steps
pairwise_sq_dists = _backend.pairwise_sq_dists

__all__ = [
    "BACKEND",
    "bmu_index",
    "bmu_batch",
    "som_train_steps",
    "pairwise_sq_dists",
]
