"""Build the optional compiled fast-marching core.

If Cython or a compiler is unavailable the package still installs and falls
back to the pure-Python kernels at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SEALRESTORE_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "sealrestore._fmm_ext",
                    ["src/sealrestore/_fmm_ext.pyx"],
                    include_dirs=[np.get_include()],
                    language="c++",
                    # no fast-math / FMA: results must match the Python kernels bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
