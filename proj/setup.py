"""CMake-driven extension build; metadata lives in pyproject.toml."""

import os
import shutil
import subprocess
import sys
from pathlib import Path

import pybind11
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        cfg = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                f"-DCMAKE_BUILD_TYPE={cfg}",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPython3_EXECUTABLE={sys.executable}",
                "-DSKEWSIM_BUILD_TESTS=OFF",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core",
             "-j", str(os.cpu_count() or 1)],
            check=True,
        )

        # the CMake tree drops the module at python/skewsim/_core*.so
        produced = sorted((build_dir / "python" / "skewsim").glob("_core*"))
        if not produced:
            raise RuntimeError("CMake build produced no _core module")
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(produced[-1], target)


setup(
    ext_modules=[CMakeExtension("skewsim._core")],
    cmdclass={"build_ext": CMakeBuild},
)
