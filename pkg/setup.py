"""Build script for the optional compiled pair-counting kernels.

The package works without the extension: ``taubounds.concordance`` falls
back to a vectorised pure-Python implementation when the compiled module
is unavailable.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Compile extensions if possible, otherwise install without them."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cython failure, ...
            warnings.warn(f"skipping compiled kernels: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name}: {exc}")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "taubounds._concordance",
                ["src/taubounds/_concordance.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
