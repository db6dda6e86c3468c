"""Build the optional Cython kernels; the package works without them."""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("crossfield._kernels", ["src/crossfield/_kernels.pyx"], include_dirs=[np.get_include()])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
