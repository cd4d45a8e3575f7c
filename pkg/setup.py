"""Build hook for the optional compiled kernel core.

The package works without the extension: ``epirisk.kernels`` falls back to
the pure-Python implementation when ``epirisk.kernels._ckernels`` is missing
(or when EPIRISK_PURE_PY=1 is set).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "epirisk.kernels._ckernels",
                ["src/epirisk/kernels/_ckernels.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
