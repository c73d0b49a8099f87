from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the interpreted kernels are used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("pwfinsler._kernels._ckernels",
                   ["src/pwfinsler/_kernels/_ckernels.pyx"],
                   extra_compile_args=["-O3"],
                   optional=True)],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )

setup(ext_modules=ext_modules)
