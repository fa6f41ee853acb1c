"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy fallback in ``_pykernels`` takes over. Set ``MEPLSIM_PURE_PYTHON=1`` to
force the fallback.
"""

import os

from . import _pykernels

_force_py = os.environ.get("MEPLSIM_PURE_PYTHON", "").strip() not in ("", "0")

if _force_py:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

RULE_M = _pykernels.RULE_M
RULE_C = _pykernels.RULE_C

sweep = _impl.sweep
enumerate_placements = _impl.enumerate_placements
pick_center = _pykernels.pick_center


def available_backends():
    """Name -> module for every importable backend (used by tests and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
