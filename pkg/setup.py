"""Build script for the optional compiled AUC kernels.

The package works without the extension (a NumPy fallback is picked at
import time), so any build problem here is downgraded to a warning
instead of failing the install.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that tolerates a failing native build."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            _warn_skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            _warn_skip(exc)


def _warn_skip(exc):
    print(
        f"WARNING: skipping native kernel build ({exc}); "
        "the pure-Python fallback will be used at runtime.",
        file=sys.stderr,
    )


def _extensions():
    if os.environ.get("STOPGEN_NO_NATIVE") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        _warn_skip("Cython is not installed")
        return []
    ext = Extension(
        "stopgen.kernels._native",
        sources=["src/stopgen/kernels/_native.pyx"],
        language="c++",
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
