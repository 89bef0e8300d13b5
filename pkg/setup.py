"""Build script for the optional compiled rate kernels.

The package is pure Python except for ``vlcrf._ratecore``, a Cython
extension holding the hot loops of the user-association solvers.  When
Cython or a C compiler is unavailable (or VLCRF_SKIP_CYTHON is set) the
extension is simply skipped and the package falls back to the NumPy
implementation at import time.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("VLCRF_SKIP_CYTHON"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "vlcrf._ratecore",
                    ["src/vlcrf/_ratecore.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
