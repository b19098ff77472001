"""Small vector helpers shared across modules."""

import numpy as np

from .errors import GeometryError


def as_vec3(x):
    v = np.asarray(x, dtype=float).reshape(3)
    return v


def unit(v, eps=1e-12):
    """Normalize a 3-vector; raises GeometryError on (near-)zero input."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < eps:
        raise GeometryError("cannot normalize a near-zero vector")
    return v / n


def frozen(a):
    """Copy to a read-only float array (for immutable dataclasses)."""
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out
