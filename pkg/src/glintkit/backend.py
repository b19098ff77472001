"""Kernel backend selection.

The compiled Cython kernel is used when importable; set
``GLINTKIT_BACKEND=python`` to force the pure numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("GLINTKIT_BACKEND", "").lower() == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

specular_points = _impl.specular_points


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return _impl.BACKEND
