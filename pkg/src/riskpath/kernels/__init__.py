"""Hot numeric kernels.

The numba backend is used when numba imports and ``RISKPATH_DISABLE_NUMBA``
is unset (or ``0``); otherwise the pure-numpy backend is used.  Both consume
identical counter-based uniforms, so uniform/constant/empirical agents give
bit-identical results; transforms through ``log``/inverse-normal may differ
in the last ulp.
"""

from __future__ import annotations

import os

from . import _numpy
from .codes import *  # noqa: F401,F403

_disabled = os.environ.get("RISKPATH_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

if _disabled:
    backend = _numpy
else:
    try:
        import numba

        if "NUMBA_THREADING_LAYER" not in os.environ:
            numba.config.THREADING_LAYER = "workqueue"
        from . import _numba as backend
    except ImportError:  # pragma: no cover
        backend = _numpy

BACKEND = backend.NAME

uniforms = backend.uniforms
transform = backend.transform
draw_raw = backend.draw_raw
losses_from_raw = backend.losses_from_raw
apply_output = backend.apply_output
kth_smallest = backend.kth_smallest
edge_quantile = backend.edge_quantile
quantile_table = backend.quantile_table
quantile_table_reuse = backend.quantile_table_reuse


def get_backend(name: str):
    """Return a backend module by name (``"numba"`` or ``"numpy"``)."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba

        return _numba
    raise ValueError(f"unknown backend {name!r}")
