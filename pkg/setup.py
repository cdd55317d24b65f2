"""Build the optional Cython kernels; the package works without them."""
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using pure Python", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc})", file=sys.stderr)


def extensions():
    if os.environ.get("ISDE_NO_EXTENSIONS"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    march = [] if os.environ.get("ISDE_PORTABLE") else ["-march=native"]
    exts = [
        Extension(
            "isde._kde_core",
            ["src/isde/_kde_core.pyx"],
            include_dirs=[np.get_include()],
            libraries=["mvec", "m"] if sys.platform.startswith("linux") else [],
            extra_compile_args=["-O3", "-ffast-math", *march],
        ),
        Extension(
            "isde._solver_core",
            ["src/isde/_solver_core.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3", *march],
        ),
    ]
    return cythonize(exts, compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
