"""Backend selection for the numeric hot loops.

The compiled extension is used when it was built; otherwise the pure-Python
module is used. Setting ``TWEETPP_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("TWEETPP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
row_norms = _impl.row_norms
cosine_scores = _impl.cosine_scores
sgd_hinge_ovr = _impl.sgd_hinge_ovr


def available_backends():
    """Map backend name to kernel module for every backend importable here."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
