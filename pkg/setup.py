import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FRACCHENLEE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "fracchenlee._ckernels",
                    ["src/fracchenlee/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # keep a*b + c unfused so both backends round identically
                    extra_compile_args=[] if os.name == "nt" else ["-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
