import os
import subprocess
import sys

import numpy as np
import pytest

from glintkit import _kernels_py
from glintkit.backend import backend_name

try:
    from glintkit import _kernels
except ImportError:
    _kernels = None

needs_compiled = pytest.mark.skipif(
    _kernels is None, reason="compiled kernels not built"
)


def _random_batch(rng, m=200, n=8):
    centers = np.array([0.0, 0.0, 40.0]) + rng.uniform(-5, 5, (m, 3))
    leds = rng.uniform(-30, 30, (n, 3))
    leds[:, 2] = rng.uniform(-5, 5, n)
    cam = np.array([-10.0, 5.0, -2.0])
    return cam, leds, centers, 7.8


@needs_compiled
def test_backends_agree(rng):
    cam, leds, centers, r = _random_batch(rng)
    a = _kernels.specular_points(cam, leds, centers, r)
    b = _kernels_py.specular_points(cam, leds, centers, r)
    assert np.array_equal(np.isnan(a), np.isnan(b))
    mask = ~np.isnan(a)
    assert np.max(np.abs(a[mask] - b[mask])) < 1e-12


@needs_compiled
def test_backends_agree_on_invalid(rng):
    # LED behind the sphere: both backends must flag the same no-solution
    cam = np.array([0.0, 0.0, 0.0])
    leds = np.array([[0.0, 0.0, 80.0]])
    centers = np.array([[0.0, 0.0, 40.0]])
    a = _kernels.specular_points(cam, leds, centers, 7.8)
    b = _kernels_py.specular_points(cam, leds, centers, 7.8)
    assert np.all(np.isnan(a)) and np.all(np.isnan(b))


def test_python_backend_env_override():
    code = (
        "from glintkit.backend import backend_name; print(backend_name())"
    )
    env = dict(os.environ, GLINTKIT_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "python"


def test_backend_name_valid():
    assert backend_name() in ("compiled", "python")


def test_python_kernel_symmetric_case():
    pts = _kernels_py.specular_points(
        np.array([-10.0, 0.0, 0.0]),
        np.array([[10.0, 0.0, 0.0]]),
        np.array([[0.0, 0.0, 40.0]]),
        7.8,
    )
    assert np.allclose(pts[0, 0], [0.0, 0.0, 32.2], atol=1e-9)


def test_python_kernel_sphere_and_law(rng):
    cam, leds, centers, r = _random_batch(rng, m=100, n=6)
    pts = _kernels_py.specular_points(cam, leds, centers, r)
    for i in range(pts.shape[0]):
        for j in range(pts.shape[1]):
            p = pts[i, j]
            if np.any(np.isnan(p)):
                continue
            assert abs(np.linalg.norm(p - centers[i]) - r) < 1e-9
            n = (p - centers[i]) / r
            v_cam = cam - p
            v_led = leds[j] - p
            cos_cam = n @ v_cam / np.linalg.norm(v_cam)
            cos_led = n @ v_led / np.linalg.norm(v_led)
            assert abs(np.arccos(cos_cam) - np.arccos(cos_led)) < 1e-9
