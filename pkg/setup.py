import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SEP_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "sepool._core._greedy",
                    ["src/sepool/_core/_greedy.pyx"],
                    language="c++",
                    extra_compile_args=["-O3", "-std=c++17", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
