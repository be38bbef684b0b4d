"""Build the optional Cython kernels.

The package works without them; ``rbcfb.kernels`` falls back to the numpy
implementations when the extension is missing.  Set RBCFB_NO_EXT=1 to skip
compilation entirely.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RBCFB_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("rbcfb._ckernels", ["src/rbcfb/_ckernels.pyx"],
                       include_dirs=[np.get_include()],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": 3,
                                 "boundscheck": False,
                                 "wraparound": False,
                                 "cdivision": True,
                                 "initializedcheck": False},
        )

setup(ext_modules=ext_modules)
