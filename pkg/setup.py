import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# fp-contract=off keeps a*b+c unfused so compiled and numpy kernels agree bitwise
ext = Extension(
    "mabuchi._hullkernel",
    ["src/mabuchi/_hullkernel.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext]) if cythonize else [])
