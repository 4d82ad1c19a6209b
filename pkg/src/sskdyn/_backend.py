"""Pick the compiled kernels when importable, else the NumPy fallback.

Set ``SSKDYN_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("SSKDYN_PURE_PYTHON") == "1":
    kernels = _fallback
    compiled = None
else:
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None
    kernels = compiled if compiled is not None else _fallback

NAME = "cython" if kernels is not _fallback else "numpy"
