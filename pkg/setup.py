"""Optional compiled kernels; the package falls back to numpy when the build is unavailable."""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("gibbsfactor._ckernels", ["src/gibbsfactor/_ckernels.pyx"],
                   include_dirs=[numpy.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except Exception as exc:  # noqa: BLE001 - any failure means pure-Python install
    print(f"compiled kernels skipped: {exc}")

setup(ext_modules=ext_modules)
