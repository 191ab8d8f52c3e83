"""Build script: compiles the optional mod-p elimination kernel.

The compiled extension is a pure speedup; if Cython or a C compiler is
missing the build falls back to the numpy backend selected at import
time in ``squarecat._modp``.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/squarecat/_modp/_kernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
