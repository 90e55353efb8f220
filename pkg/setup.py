"""Builds the optional Cython core; the package falls back to numpy without it."""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [Extension("smfading._kernels", ["src/smfading/_kernels.pyx"],
                   include_dirs=[np.get_include()],
                   extra_compile_args=["-O3", "-ffp-contract=off"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
