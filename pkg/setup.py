"""Build script for the optional compiled Monte Carlo kernel.

The package is fully functional without the extension (a pure-Python
kernel with identical semantics is selected at import time), so the
extension is marked optional: installs succeed on systems without a
C compiler, just slower.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PNRSIM_SKIP_EXT", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize

        ext = Extension(
            "pnrsim.mcsim._kernels._mc_cy",
            ["src/pnrsim/mcsim/_kernels/_mc_cy.pyx"],
            optional=True,
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
