"""Builds the optional compiled kernels; the package works without them."""

import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("SUBBAND_ERROR_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        # Double-double kernels rely on strict IEEE evaluation order.
        cflags = [] if sys.platform == "win32" else ["-O2", "-ffp-contract=off", "-fno-fast-math"]
        ext_modules = cythonize(
            [
                Extension(
                    "subband_error._kernels",
                    ["src/subband_error/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=cflags,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
