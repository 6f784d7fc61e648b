"""Build script: compiles the optional max-flow extension.

If Cython or a C compiler is unavailable the install still succeeds and the
package falls back to the pure-Python solver (see radialcut._core).
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/radialcut/_core/_maxflow.pyx"],
        language_level="3",
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except Exception as exc:  # pragma: no cover - degraded install path
    sys.stderr.write(
        "radialcut: skipping compiled max-flow extension (%s); "
        "the pure-Python solver will be used\n" % exc
    )

setup(ext_modules=ext_modules)
