"""Build the optional Cython kernel; the package works without it."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SUMSET_LAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "sumset_lab._ckernels",
                    ["src/sumset_lab/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
