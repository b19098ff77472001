"""Pure numpy implementation of the specular-reflection kernel.

This is the fallback backend; ``glintkit._kernels`` (Cython) implements the
same bisection with identical arithmetic and is preferred when available.
"""

import numpy as np

BACKEND = "python"

# Fixed bisection count: interval shrinks to pi/2^60, far below the 1e-9 rad
# acceptance tolerance, and keeps the two backends numerically interchangeable.
N_BISECT = 60

_EPS_DOT = 1e-12


def specular_points(cam_pos, led_pos, centers, radius):
    """Specular reflection points of point lights on a mirror sphere.

    For every (sphere center, LED) pair, finds the point ``P`` on the sphere
    of the given radius where a ray from the LED reflects into the camera
    position, by bisection on the arc angle in the plane spanned by the
    camera, the LED, and the center.

    :param cam_pos: (3,) camera position, mm.
    :param led_pos: (n, 3) LED positions, mm.
    :param centers: (m, 3) sphere centers, mm.
    :param radius: sphere radius, mm (> 0).
    :return: (m, n, 3) array of specular points; rows are NaN where no
        camera-visible reflection exists (grazing, far hemisphere, or a
        position inside the sphere).
    """
    cam_pos = np.asarray(cam_pos, dtype=float)
    led_pos = np.atleast_2d(np.asarray(led_pos, dtype=float))
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    r = float(radius)

    c = cam_pos[None, :] - centers                      # (m, 3)
    nc = np.linalg.norm(c, axis=1)                      # (m,)
    safe_nc = np.where(nc > 0, nc, 1.0)
    e1 = c / safe_nc[:, None]

    q = led_pos[None, :, :] - centers[:, None, :]       # (m, n, 3)
    nq = np.linalg.norm(q, axis=2)                      # (m, n)
    qx = np.einsum("mnk,mk->mn", q, e1)                 # (m, n)
    w = q - qx[:, :, None] * e1[:, None, :]
    s = np.linalg.norm(w, axis=2)
    safe_s = np.where(s > 1e-12, s, 1.0)
    e2 = w / safe_s[:, :, None]

    lo = np.zeros_like(qx)
    hi = np.arctan2(s, qx)

    # f decreases from >= 0 at theta=0 (surface point toward the camera)
    # to <= 0 at theta_hi (toward the LED); bisection keeps f(lo) >= f(hi).
    f_lo = _angle_residual(lo, nc[:, None], qx, s, r)
    f_hi = _angle_residual(hi, nc[:, None], qx, s, r)
    bracketed = (f_lo >= -_EPS_DOT) & (f_hi <= _EPS_DOT)

    for _ in range(N_BISECT):
        mid = 0.5 * (lo + hi)
        f_mid = _angle_residual(mid, nc[:, None], qx, s, r)
        take_lo = f_mid >= 0.0
        lo = np.where(take_lo, mid, lo)
        hi = np.where(take_lo, hi, mid)

    theta = 0.5 * (lo + hi)
    ct = np.cos(theta)
    st = np.sin(theta)

    # Visibility: the surface normal must face the camera.
    vox = nc[:, None] - r * ct
    voy = -r * st
    no = np.hypot(vox, voy)
    dot_cam = (ct * vox + st * voy) / np.where(no > 0, no, 1.0)

    valid = bracketed & (nc[:, None] > r) & (nq > r) & (dot_cam > _EPS_DOT)

    points = (
        centers[:, None, :]
        + r * ct[:, :, None] * e1[:, None, :]
        + r * st[:, :, None] * e2
    )
    points = np.where(valid[:, :, None], points, np.nan)
    return points


def _angle_residual(theta, nc, qx, s, r):
    """cos(angle to camera) - cos(angle to LED) at arc angle theta.

    Works in the 2D reflection plane: camera at (nc, 0), LED at (qx, s),
    surface point at r*(cos theta, sin theta) with outward normal along it.
    """
    ct = np.cos(theta)
    st = np.sin(theta)
    vox = nc - r * ct
    voy = -r * st
    vlx = qx - r * ct
    vly = s - r * st
    no = np.hypot(vox, voy)
    nl = np.hypot(vlx, vly)
    no = np.where(no > 0, no, 1.0)
    nl = np.where(nl > 0, nl, 1.0)
    return (ct * vox + st * voy) / no - (ct * vlx + st * vly) / nl
