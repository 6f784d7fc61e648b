"""Solver selection: compiled extension when built, pure Python otherwise.

Set RADIALCUT_FORCE_PYTHON=1 to force the fallback (used by the benchmark
and by tests that exercise both paths).
"""

import os

from . import maxflow_py

IMPLEMENTATION = "python"
max_flow_arrays = maxflow_py.max_flow

if not os.environ.get("RADIALCUT_FORCE_PYTHON"):
    try:
        from . import _maxflow

        IMPLEMENTATION = "compiled"
        max_flow_arrays = _maxflow.max_flow
    except ImportError:
        pass


def implementations():
    """All importable solver implementations, keyed by name."""
    impls = {"python": maxflow_py.max_flow}
    try:
        from . import _maxflow

        impls["compiled"] = _maxflow.max_flow
    except ImportError:
        pass
    return impls
