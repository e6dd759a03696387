"""Build the optional Cython kernels.

The package works without them: ``cvbell._backend`` falls back to the
pure-Python kernels when the extension cannot be imported.
"""
import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """Skip the extension instead of failing the install when no compiler is present."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: Cython kernels not built ({exc}); using pure-Python fallback",
                  file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc})", file=sys.stderr)


ext_modules = []
if cythonize is not None and not os.environ.get("CVBELL_NO_EXT"):
    ext_modules = cythonize(
        [Extension("cvbell._kernels", ["src/cvbell/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
