"""Build script for the optional compiled kernel core.

The package is fully functional without the extension: ``shapeqc._kernels``
falls back to pure numpy implementations of the same kernels at import time.
Building the extension only makes the hot loops (tree split search, batch
tree traversal) faster; results are bit-identical either way.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the Cython core if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cythonize failure, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "WARNING: shapeqc compiled kernels were not built (%s).\n"
            "         Falling back to the pure numpy kernels at runtime.\n" % exc
        )


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        OptionalBuildExt._warn(exc)
        return []
    ext = Extension(
        "shapeqc._kernels._ckern",
        sources=[os.path.join("src", "shapeqc", "_kernels", "_ckern.pyx")],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
