"""Kernel backend selection.

Imports the compiled Cython core when available and falls back to the pure
numpy implementations otherwise. Both produce bit-identical results (see
tests/test_backends.py), so the choice only affects speed. Override with
``SHAPEQC_BACKEND=pure`` or ``SHAPEQC_BACKEND=compiled``.
"""

from __future__ import annotations

import os

from . import _pure

_forced = os.environ.get("SHAPEQC_BACKEND", "").strip().lower()

if _forced not in ("", "pure", "compiled"):
    raise ValueError(f"SHAPEQC_BACKEND must be 'pure' or 'compiled', got {_forced!r}")

if _forced == "pure":
    _impl = _pure
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "SHAPEQC_BACKEND=compiled but the shapeqc._kernels._ckern "
                "extension is not built; reinstall with a C compiler available"
            ) from None
        _impl = _pure

BACKEND = _impl.BACKEND
gini_best_split = _impl.gini_best_split
newton_best_split = _impl.newton_best_split
tree_apply = _impl.tree_apply

__all__ = ["BACKEND", "gini_best_split", "newton_best_split", "tree_apply"]
