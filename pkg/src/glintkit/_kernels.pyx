# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled specular-reflection kernel.

Same bisection as glintkit._kernels_py, written as tight scalar loops. The
arithmetic mirrors the numpy version expression by expression so the two
backends agree to floating-point roundoff.
"""

import numpy as np

from libc.math cimport atan2, cos, hypot, sin, sqrt, NAN

BACKEND = "compiled"

cdef int N_BISECT = 60
cdef double EPS_DOT = 1e-12


cdef inline double _residual(double theta, double nc, double qx, double s,
                             double r) nogil:
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    cdef double vox = nc - r * ct
    cdef double voy = -r * st
    cdef double vlx = qx - r * ct
    cdef double vly = s - r * st
    cdef double no = hypot(vox, voy)
    cdef double nl = hypot(vlx, vly)
    if no <= 0:
        no = 1.0
    if nl <= 0:
        nl = 1.0
    return (ct * vox + st * voy) / no - (ct * vlx + st * vly) / nl


def specular_points(cam_pos, led_pos, centers, radius):
    """See glintkit._kernels_py.specular_points."""
    cam = np.ascontiguousarray(cam_pos, dtype=np.float64)
    leds = np.ascontiguousarray(np.atleast_2d(led_pos), dtype=np.float64)
    cens = np.ascontiguousarray(np.atleast_2d(centers), dtype=np.float64)

    cdef const double[::1] o = cam.ravel()
    cdef const double[:, ::1] l = leds
    cdef const double[:, ::1] c = cens
    cdef double r = float(radius)

    cdef Py_ssize_t m = c.shape[0]
    cdef Py_ssize_t n = l.shape[0]
    out = np.empty((m, n, 3), dtype=np.float64)
    cdef double[:, :, ::1] p = out

    cdef Py_ssize_t i, j, it
    cdef double cx, cy, cz, nc, e1x, e1y, e1z
    cdef double qdx, qdy, qdz, nq, qx, wx, wy, wz, s, e2x, e2y, e2z
    cdef double lo, hi, mid, f_lo, f_hi, f_mid, theta, ct, st
    cdef double vox, voy, no, dot_cam

    with nogil:
        for i in range(m):
            cx = o[0] - c[i, 0]
            cy = o[1] - c[i, 1]
            cz = o[2] - c[i, 2]
            nc = sqrt(cx * cx + cy * cy + cz * cz)
            if nc > 0:
                e1x = cx / nc
                e1y = cy / nc
                e1z = cz / nc
            else:
                e1x = e1y = e1z = 0.0
            for j in range(n):
                qdx = l[j, 0] - c[i, 0]
                qdy = l[j, 1] - c[i, 1]
                qdz = l[j, 2] - c[i, 2]
                nq = sqrt(qdx * qdx + qdy * qdy + qdz * qdz)
                qx = qdx * e1x + qdy * e1y + qdz * e1z
                wx = qdx - qx * e1x
                wy = qdy - qx * e1y
                wz = qdz - qx * e1z
                s = sqrt(wx * wx + wy * wy + wz * wz)
                if s > 1e-12:
                    e2x = wx / s
                    e2y = wy / s
                    e2z = wz / s
                else:
                    e2x = e2y = e2z = 0.0

                lo = 0.0
                hi = atan2(s, qx)
                f_lo = _residual(lo, nc, qx, s, r)
                f_hi = _residual(hi, nc, qx, s, r)
                if f_lo < -EPS_DOT or f_hi > EPS_DOT or nc <= r or nq <= r:
                    p[i, j, 0] = NAN
                    p[i, j, 1] = NAN
                    p[i, j, 2] = NAN
                    continue
                # f decreases from >= 0 at theta=0 to <= 0 at the LED end.
                for it in range(N_BISECT):
                    mid = 0.5 * (lo + hi)
                    f_mid = _residual(mid, nc, qx, s, r)
                    if f_mid >= 0.0:
                        lo = mid
                    else:
                        hi = mid
                theta = 0.5 * (lo + hi)
                ct = cos(theta)
                st = sin(theta)

                vox = nc - r * ct
                voy = -r * st
                no = hypot(vox, voy)
                if no <= 0:
                    no = 1.0
                dot_cam = (ct * vox + st * voy) / no
                if dot_cam <= EPS_DOT:
                    p[i, j, 0] = NAN
                    p[i, j, 1] = NAN
                    p[i, j, 2] = NAN
                    continue

                p[i, j, 0] = c[i, 0] + r * ct * e1x + r * st * e2x
                p[i, j, 1] = c[i, 1] + r * ct * e1y + r * st * e2y
                p[i, j, 2] = c[i, 2] + r * ct * e1z + r * st * e2z
    return out
