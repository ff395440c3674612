"""Numeric backend selection.

The hot kernels (squared-distance blocks, nearest-neighbor matching, and
Nadaraya-Watson smoothing) exist twice: a Cython extension built at install
time and a pure NumPy fallback. The compiled module is preferred when
importable; set ``HTE_BACKEND=python`` to force the fallback. Both backends
implement the same contracts, and the matching primitives are bit-identical
(same IEEE operation order), so estimator output does not depend on which
one is active.
"""

import os

from . import _ref

_impl = _ref
BACKEND = "python"

if os.environ.get("HTE_BACKEND", "").lower() not in ("python", "ref"):
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        pass

sqdist_matrix = _impl.sqdist_matrix
match_nearest = _impl.match_nearest
nw_smooth = _impl.nw_smooth
