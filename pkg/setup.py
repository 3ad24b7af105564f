"""Builds the optional compiled kernel extension.

The package works without the extension (a pure-NumPy fallback is selected
at import time), so a failed compile only costs speed. All other metadata
lives in pyproject.toml.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "scallop_pair._kernels._core",
        ["src/scallop_pair/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
