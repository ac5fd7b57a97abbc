"""Build the optional compiled kernel for the NMF inner loop.

The package works without the extension: ``skinmetrics.nmf`` falls back to a
pure-numpy implementation of the same update loop when the compiled module is
missing. Building it just makes batch runs considerably faster.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        name="skinmetrics._mu_kernel",
        sources=["src/skinmetrics/_mu_kernel.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
