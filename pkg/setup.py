"""Build script for the optional compiled kernels.

The extension is marked optional: when Cython or a C compiler is missing the
package still installs and falls back to the numpy kernels at import time.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "frstr._kernels",
                ["src/frstr/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
