import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("TOPOMARGIN_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("topomargin._core", ["src/topomargin/_core.pyx"], language="c++")],
            language_level="3",
        )
    except ImportError:
        # No Cython: install pure-Python only; topomargin.backend falls back at import.
        pass

setup(ext_modules=ext_modules)
