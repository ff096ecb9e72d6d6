"""Build script for the compiled kernel extension.

The extension is optional: if Cython or a C compiler is unavailable the
package still installs and falls back to the pure-Python kernels.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RSMA_HARQ_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "rsma_harq._ckernels",
                    ["src/rsma_harq/_ckernels.pyx"],
                    # no contraction or fast-math: results must match the Python kernels bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
                    libraries=["m"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
