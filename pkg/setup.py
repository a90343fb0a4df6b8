"""Build script: compiles the optional fast kernel extension.

The package works without the extension (a pure NumPy backend is selected
at import time); pass NKSIX_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("NKSIX_NO_EXT"):
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/nksix/_kernels/_fast.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.extra_compile_args.append("-O3")

setup(ext_modules=ext_modules)
