"""Build script: compiles the hot-loop extension when Cython is available.

Set SHUFFLE_LAB_PURE=1 to skip the extension entirely; the package then runs
on the numpy fallback selected at import time (see shuffle_lab.backend).
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SHUFFLE_LAB_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "shuffle_lab._kernels",
                    sources=["src/shuffle_lab/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
