"""Build script for the optional compiled kernels.

The package works without the extension (a pure Python backend is selected at
import time), so any failure here degrades to a source-only install rather
than aborting.  Set SVPFORGE_NO_EXT=1 to skip the extension on purpose.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SVPFORGE_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "svpforge.kernels._speedups",
                    ["src/svpforge/kernels/_speedups.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
