"""CMake-driven build of the _svdrec extension for setuptools.

The canonical build is plain CMake (see README); this glue exists so
`pip install -e . --no-build-isolation` produces an importable package from
the same CMakeLists without a scikit-build dependency.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, sourcedir: str = "") -> None:
        super().__init__(name, sources=[])
        self.sourcedir = str(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        extdir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_temp = Path(self.build_temp) / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            ext.sourcedir,
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={extdir}{os.sep}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DCMAKE_BUILD_TYPE=Release",
            "-DSVDREC_BUILD_TESTS=OFF",
        ]
        subprocess.run(configure, cwd=build_temp, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_svdrec", "-j", str(os.cpu_count() or 2)],
            cwd=build_temp,
            check=True,
        )


setup(
    packages=["svdrec"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("svdrec._svdrec")],
    cmdclass={"build_ext": CMakeBuild},
)
