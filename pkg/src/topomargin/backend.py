"""Kernel backend selection.

The hot loops (boundary-matrix reduction, skip-gram training) live in a
compiled Cython extension with a pure-Python twin. The compiled core is used
when importable; set TOPOMARGIN_PURE_PYTHON=1 to force the fallback. Both
produce identical outputs; only speed differs (see benchmarks/).
"""

import os

from . import _core_py

if os.environ.get("TOPOMARGIN_PURE_PYTHON"):
    _impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _core_py
        BACKEND = "python"

reduce_boundary = _impl.reduce_boundary
sgns_train = _impl.sgns_train
reduce_boundary_plain = _core_py.reduce_boundary_plain
