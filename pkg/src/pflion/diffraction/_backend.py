"""Pick the compiled kernels when available.

Set ``PFLION_PURE_PYTHON=1`` to force the NumPy fallback.
"""
import logging
import os

from . import _kernel_py

_logger = logging.getLogger(__name__)

BACKEND = "python"
rs_radial = _kernel_py.rs_radial
rs_planar = _kernel_py.rs_planar

if os.environ.get("PFLION_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernel as _compiled
    except ImportError:  # extension not built
        _logger.debug("compiled kernels unavailable, using NumPy fallback")
    else:
        BACKEND = "cython"
        rs_radial = _compiled.rs_radial
        rs_planar = _compiled.rs_planar
