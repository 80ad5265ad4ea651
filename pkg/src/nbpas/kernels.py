"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting the environment
variable ``NBPAS_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("NBPAS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback

wht_rows = _impl.wht_rows
bp_decode = _impl.bp_decode
de_step = _impl.de_step

__all__ = ["BACKEND", "wht_rows", "bp_decode", "de_step"]
