import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; the DP falls back automatically
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("DELTAFPT_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "deltafpt._dpkernel",
                ["src/deltafpt/_dpkernel.pyx"],
                language="c++",
                extra_compile_args=["-O3", "-std=c++17"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
