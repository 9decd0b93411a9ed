"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise the numpy
``_fallback`` is used.  Setting ``GREENPERTURB_PURE=1`` forces the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback
if os.environ.get("GREENPERTURB_PURE", "0") in ("", "0"):
    try:
        from . import _core as _impl  # noqa: F811

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _fallback

rect_log_mean = _impl.rect_log_mean
disk_kernel = _impl.disk_kernel
sw_assemble = _impl.sw_assemble
star_crossings = _impl.star_crossings

__all__ = ["BACKEND", "rect_log_mean", "disk_kernel", "sw_assemble", "star_crossings"]
