import sys

from setuptools import setup

# The compiled row-reduction kernel is optional: dspkit falls back to the
# pure-Python implementation when the extension is absent.
ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("dspkit._ffref", ["src/dspkit/_ffref.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    sys.stderr.write("dspkit: building without compiled kernel (%s)\n" % exc)

setup(ext_modules=ext_modules)
