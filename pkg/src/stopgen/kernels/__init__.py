"""Hot-loop kernels with a compiled core and a NumPy fallback.

The compiled extension is preferred when importable.  Selection can be
forced with STOPGEN_KERNEL=native or STOPGEN_KERNEL=python; forcing
"native" raises if the extension is missing instead of silently falling
back.
"""

from __future__ import annotations

import os

_requested = os.environ.get("STOPGEN_KERNEL", "").strip().lower()

if _requested in ("", "native"):
    try:
        from . import _native as _impl
    except ImportError:
        if _requested == "native":
            raise
        from . import _fallback as _impl
elif _requested in ("python", "fallback"):
    from . import _fallback as _impl
else:
    raise RuntimeError(
        f"STOPGEN_KERNEL must be 'native' or 'python', got {_requested!r}"
    )

BACKEND: str = _impl.BACKEND_NAME
auc_rank = _impl.auc_rank
auc_batch_updated = _impl.auc_batch_updated

__all__ = ["BACKEND", "auc_rank", "auc_batch_updated"]
