"""Build the optional compiled orbit kernel.

The package works without it; ``parabolic_shift._backend`` falls back to the
pure-Python kernel when ``parabolic_shift._kernel`` cannot be imported.
"""

import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("PARABOLIC_SHIFT_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "parabolic_shift._kernel",
                ["src/parabolic_shift/_kernel.pyx"],
                include_dirs=[np.get_include()],
                # no fused multiply-add: the double-double pole residual relies on exact rounding
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
