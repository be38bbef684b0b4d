"""Backend selection for the numeric kernels.

The compiled extension ``rbcfb._ckernels`` is used when it imports; otherwise
the numpy versions in ``rbcfb._pykernels`` are used.  Setting the environment
variable ``RBCFB_PURE_PYTHON=1`` forces the numpy path.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("RBCFB_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

chol_pivots = _impl.chol_pivots
vertex_candidates = _impl.vertex_candidates

__all__ = ["BACKEND", "chol_pivots", "vertex_candidates"]
