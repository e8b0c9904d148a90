from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python fallback is selected at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("dpl._kernels_c", ["src/dpl/_kernels_c.pyx"], optional=True)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
