import os

from setuptools import Extension, setup

# The compiled kernels are optional: when Cython (or a C compiler) is not
# available the package falls back to the numpy implementation at import time.
# Set POSNB_NO_EXTENSION=1 to force a pure-Python install.
ext_modules = []
if os.environ.get("POSNB_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "posnb._kernels",
                    ["src/posnb/_kernels.pyx"],
                    # no -ffast-math: scoring relies on IEEE log(0) == -inf
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
