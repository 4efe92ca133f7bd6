import glob
import os
import subprocess

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def vendor_include():
    return "vendor" if os.path.exists("vendor/json.hpp") else "/opt/vendor"


def eigen_include():
    try:
        out = subprocess.run(
            ["pkg-config", "--cflags-only-I", "eigen3"], capture_output=True, text=True
        )
        for token in out.stdout.split():
            if token.startswith("-I"):
                return token[2:]
    except OSError:
        pass
    return "/usr/include/eigen3"


ext = Pybind11Extension(
    "carleson._core",
    sources=sorted(glob.glob("src/*.cpp")) + ["bindings/pymodule.cpp"],
    include_dirs=["include", vendor_include(), eigen_include()],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
