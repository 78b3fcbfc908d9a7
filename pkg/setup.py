"""Build script for the optional compiled kernels.

If Cython or a C compiler is unavailable the package still installs and
falls back to the pure-Python kernels at import time.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "z3flow._kernels",
                ["src/z3flow/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
