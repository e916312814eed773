import os

from setuptools import Extension, setup

# The compiled geometry kernels are an optimization, not a requirement: the
# package falls back to the numpy implementation when the extension is absent.
# Set SCANFORGE_SKIP_EXT=1 to install without a C toolchain.
ext_modules = []
if os.environ.get("SCANFORGE_SKIP_EXT") != "1":
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "scanforge.geom._kernels",
                ["src/scanforge/geom/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # -ffp-contract=off keeps float results bit-identical to the
                # numpy fallback (no fused multiply-add).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
