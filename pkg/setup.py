"""Build script: compiles the optional stencil extension when Cython is available.

The package works without it (a numpy fallback is selected at import time),
so the extension is marked optional and any build failure is non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tripleflow.kernels._stencils",
                ["src/tripleflow/kernels/_stencils.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
