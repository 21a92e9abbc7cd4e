import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class BuildFailed(Exception):
    pass


class optional_build_ext(build_ext):
    """Build the Cython speedups if possible, otherwise install pure-Python only."""

    def run(self):
        try:
            build_ext.run(self)
        except Exception as exc:
            self._warn(exc)

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "WARNING: compiled kernels could not be built (%s).\n"
            "         logembed will fall back to the slower pure-Python kernels.\n" % exc
        )


def extensions():
    if os.environ.get("LOGEMBED_NO_EXTENSION"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "logembed._inner",
        ["src/logembed/_inner.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
