"""Build script for the compiled renewal kernels.

The package works without the extension (numpy fallback); build in place with

    python setup.py build_ext --inplace

or let `pip install -e . --no-build-isolation` handle it.
"""
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "nextpm.kernels._renewal",
                sources=["src/nextpm/kernels/_renewal.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
