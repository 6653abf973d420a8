"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``LOEWNERKIT_PURE=1`` to force the numpy path.
"""
import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("LOEWNERKIT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

loewner_blocks = _impl.loewner_blocks
cauchy = _impl.cauchy
bary_eval_siso = _impl.bary_eval_siso

__all__ = ["BACKEND", "loewner_blocks", "cauchy", "bary_eval_siso"]
