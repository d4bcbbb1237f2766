"""Build script: compiles the Jacobi eigensolver kernel when Cython and a C
compiler are available.  The package works without it (pure-Python fallback
selected at import time), so any build failure here downgrades to a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "unispan._jacobi",
                ["src/unispan/_jacobi.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"unispan: skipping compiled kernel ({exc}); "
          "pure-Python fallback will be used", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
