import os

from setuptools import Extension, setup

# WELDMON_NO_EXT=1 skips the compiled kernels; the package then runs on the
# pure-numpy fallback selected at import time.
ext_modules = []
if os.environ.get("WELDMON_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "weldmon._kernels._fast",
                    ["src/weldmon/_kernels/_fast.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
