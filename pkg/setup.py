import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("AMBIGUITY_LAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install; kernels fall back to numpy
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("ambiguity_lab._kernels", ["src/ambiguity_lab/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
