"""Build script. The compiled kernels are optional: if Cython (or a C
compiler) is unavailable the package installs anyway and falls back to the
pure-Python kernel implementations at import time."""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Degrade to a pure-Python install when extension compilation fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "warning: building the lunasil._kernels._core extension failed "
            f"({exc!r}); falling back to the pure-Python kernels.\n"
        )


def make_ext_modules():
    if os.environ.get("LUNASIL_NO_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        sys.stderr.write(
            "warning: Cython not available; installing lunasil with the "
            "pure-Python kernels only.\n"
        )
        return []
    ext = Extension(
        "lunasil._kernels._core",
        ["src/lunasil/_kernels/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
            "embedsignature": True,
            "language_level": "3",
        },
    )


setup(ext_modules=make_ext_modules(), cmdclass={"build_ext": OptionalBuildExt})
