import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "pmetraj._backend._kernels",
                ["src/pmetraj/_backend/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # The package still works without the compiled core: the pure-Python
    # backend is selected at import time.
    extensions = []

setup(ext_modules=extensions)
