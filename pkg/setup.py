"""Build script: compiles the optional fast kernels.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""
import sys

from setuptools import Extension, setup

ext_modules = []
cmdclass = {}

try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "cvxlab._core",
        sources=["src/cvxlab/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )
except Exception as exc:  # no cython / no compiler: pure-python install
    print(f"cvxlab: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass=cmdclass)
