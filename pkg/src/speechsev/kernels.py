"""Kernel backend selection.

The compiled extension is preferred; set ``SPEECHSEV_BACKEND=python`` to force
the numpy fallback (``compiled`` makes a missing extension an error).
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled


def select_backend(name=None):
    """Return the kernel module for ``name`` (or the environment/default choice)."""
    name = name or os.environ.get("SPEECHSEV_BACKEND") or None
    if name is None:
        return _compiled if _compiled is not None else _kernels_py
    try:
        return BACKENDS[name]
    except KeyError:
        raise ImportError(
            f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}"
        ) from None


_active = select_backend()

BACKEND = _active.BACKEND
block_extrema = _active.block_extrema
interpolate_anchors = _active.interpolate_anchors
masked_ratio_sum = _active.masked_ratio_sum
