"""Build script: compiles the pairwise Cython core when the toolchain allows.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any build failure here is non-fatal.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/wadbounds/_core/_pairwise.pyx"],
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # missing Cython/compiler: fall back to pure Python
    print(f"wadbounds: building without compiled core ({exc})")

setup(ext_modules=ext_modules)
