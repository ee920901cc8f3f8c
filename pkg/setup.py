"""Builds the optional compiled kernel; the package works without it."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    pass
else:
    ext_modules = cythonize(
        "src/pbgt/_speedups.pyx",
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3"]
        ext.optional = True

setup(ext_modules=ext_modules)
