"""Build script: compiles the optional mask-kernel extension.

The package is fully functional without the extension; kernels.py falls
back to the pure-Python implementation when the import fails.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cantordyn._maskcore",
                ["src/cantordyn/_maskcore.pyx"],
            )
        ],
        language_level=3,
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
