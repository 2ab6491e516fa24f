"""Build script for the compiled enumeration kernels.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the exhaustive
sign/subset enumerations faster.
"""

from setuptools import setup
from setuptools.extension import Extension

import numpy


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "schattenlab._kernels",
        ["src/schattenlab/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions())
