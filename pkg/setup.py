"""Build script: compiles the optional Cython kernel extension.

The extension is marked optional: if Cython or a C compiler is missing the
install still succeeds and the package falls back to the pure-Python kernels
at import time.  Set TWOSTREAM_PURE_PYTHON=1 to skip the extension entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TWOSTREAM_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "twostream._kernels",
                    ["src/twostream/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
