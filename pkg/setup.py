import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# No -march=native / -ffast-math and contraction off: the compiled kernels
# must agree bit-for-bit with the pure NumPy fallback.
extensions = [
    Extension(
        "lanekeep.kernels._core",
        ["src/lanekeep/kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
