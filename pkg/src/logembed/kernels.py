"""Backend selection for the training hot loops.

At import time the compiled extension (logembed._inner, built from Cython) is
preferred; if it is missing, or LOGEMBED_PURE_PYTHON is set in the
environment, the NumPy fallback (logembed._inner_py) is used instead.  Both
expose the same two functions with the same semantics; see
benchmarks/bench_kernels.py for the speed gap.
"""
from __future__ import annotations

import os

from . import _inner_py

if os.environ.get("LOGEMBED_PURE_PYTHON"):
    _impl = _inner_py
else:
    try:
        from . import _inner as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _inner_py

COMPILED: bool = bool(_impl.COMPILED)
BACKEND: str = "cython" if COMPILED else "python"

gine_batch = _impl.gine_batch
log_epoch = _impl.log_epoch
