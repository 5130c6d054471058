import os

import numpy as np
from setuptools import Extension, setup

# The compiled core is optional: if Cython or a C compiler is missing the
# package installs and runs on the numpy fallback.
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("FASTRSQRT_NO_EXT"):
    extensions = [
        Extension(
            "fastrsqrt._core",
            ["src/fastrsqrt/_core.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            # Bit-exact binary32 semantics: no FMA contraction, no fast-math.
            extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
