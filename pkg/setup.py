"""Build the optional compiled kernels for hspgen.

The package works without them; ``hspgen.kernels`` falls back to the pure
Python implementation when the extension is missing.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("HSPGEN_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("hspgen._ckernels", ["src/hspgen/_ckernels.pyx"], extra_compile_args=["-O2"])],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=ext_modules)
