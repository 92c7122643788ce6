"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``WIRETAP_KIT_PURE=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("WIRETAP_KIT_PURE"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

walk_ends = _impl.walk_ends
sf_walk_dfs = _impl.sf_walk_dfs
gf2_apply = _impl.gf2_apply
coset_histograms = _impl.coset_histograms
