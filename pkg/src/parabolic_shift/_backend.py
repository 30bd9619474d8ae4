"""Select the orbit kernel at import time.

The compiled ``_kernel`` extension is used when it imports; otherwise the
pure-Python ``_kernel_py`` module.  Setting ``PARABOLIC_SHIFT_BACKEND=python``
forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernel_py

python_kernel = _kernel_py

compiled_kernel = None
if os.environ.get("PARABOLIC_SHIFT_BACKEND", "").lower() != "python":
    try:
        from . import _kernel as compiled_kernel
    except ImportError:
        compiled_kernel = None

kernel = compiled_kernel if compiled_kernel is not None else python_kernel
BACKEND = "compiled" if compiled_kernel is not None else "python"
