"""Builds the optional Cython kernel extension.

The package works without it (numpy fallback); any build failure here is
non-fatal so `pip install` succeeds on toolchain-less machines.
"""

import sys

from setuptools import Extension, setup


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"convlens: skipping compiled kernels ({exc})", file=sys.stderr)
        return []
    ext = Extension(
        "convlens._kernels_cy",
        sources=["src/convlens/_kernels_cy.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions())
