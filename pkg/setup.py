from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("vigcell.kernels._fast", ["src/vigcell/kernels/_fast.pyx"])],
        language_level=3,
    )
except ImportError:
    # package still works on the pure NumPy kernels
    ext_modules = []

setup(ext_modules=ext_modules)
