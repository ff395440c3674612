"""Build script for the optional compiled backend.

The package is pure Python plus one Cython extension holding the hot
numeric kernels (pairwise distances, nearest-neighbor matching, kernel
smoothing). If Cython or a C compiler is unavailable the extension is
skipped and the package falls back to the NumPy implementation at import
time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HTE_SKIP_NATIVE") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "hte._backend._native",
                    ["src/hte/_backend/_native.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
