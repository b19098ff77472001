"""Builds the optional compiled kernel. The package falls back to the pure
numpy kernels at import time when the extension is unavailable."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("glintkit._kernels", ["src/glintkit/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
