"""Build the optional Cython combine kernels.

If Cython or a C compiler is missing the package installs without them and
``srtm._kernels`` falls back to the numpy implementation.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SRTM_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("srtm._kernels._ckernels", ["src/srtm/_kernels/_ckernels.pyx"],
                       include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []


setup(ext_modules=ext_modules)
