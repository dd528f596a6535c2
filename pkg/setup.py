"""Builds the optional compiled search kernel; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("PLANLINGUA_NO_EXTENSION", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("planlingua.planner._kernel", ["src/planlingua/planner/_kernel.pyx"],
                       language="c++", extra_compile_args=["-O3", "-std=c++17"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
