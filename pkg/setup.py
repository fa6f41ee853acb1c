import os

import numpy as np
from setuptools import Extension, setup

# The compiled core is optional: without Cython the package runs on the numpy fallback.
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("MEPLSIM_NO_EXT", "") in ("", "0"):
    ext_modules = cythonize(
        [
            Extension(
                "meplsim._kernels._ckernels",
                ["src/meplsim/_kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                language="c++",
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
