"""Select the coordinate-descent kernels at import time.

The compiled ``_cd_fast`` extension is used when it was built; otherwise the
pure-Python ``_cd_py`` module takes over. Setting ``LVGLASSO_PURE_PYTHON=1``
forces the fallback.
"""
import os

from . import _cd_py

kernels = _cd_py
BACKEND = "python"

if not os.environ.get("LVGLASSO_PURE_PYTHON"):
    try:
        from . import _cd_fast
    except ImportError:  # extension not built
        pass
    else:
        kernels = _cd_fast
        BACKEND = "cython"
