"""Camera models and ray geometry in the device frame.

Device frame convention: right-handed, +Z toward the scene, +X to the
user's right, +Y up, units mm. Camera frame: +Z along the viewing axis,
pixel u grows with camera +X, pixel v with camera +Y. Poses are
camera-to-device: X_device = R @ X_camera + T.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ProjectionError, ValidationError
from .vecmath import frozen, unit

_ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class Pose:
    """Rigid camera-to-device transform (R orthonormal, det +1; T in mm)."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = frozen(np.asarray(self.rotation, dtype=float).reshape(3, 3))
        t = frozen(np.asarray(self.translation, dtype=float).reshape(3))
        if np.max(np.abs(r @ r.T - np.eye(3))) > _ORTHO_TOL:
            raise ValidationError("rotation is not orthonormal")
        if abs(np.linalg.det(r) - 1.0) > _ORTHO_TOL:
            raise ValidationError("rotation must have det +1")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity():
        return Pose(np.eye(3), np.zeros(3))


@dataclass(frozen=True)
class CentralIntrinsics:
    """Pinhole intrinsics in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValidationError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValidationError("principal point must lie inside the image")


@dataclass(frozen=True)
class GenericRayGrid:
    """Per-pixel camera-frame rays: origins and unit directions, one node
    per integer pixel coordinate, bilinearly interpolated between nodes."""

    width: int
    height: int
    origins: np.ndarray     # (height, width, 3), mm
    directions: np.ndarray  # (height, width, 3), unit

    def __post_init__(self):
        o = np.asarray(self.origins, dtype=float)
        d = np.asarray(self.directions, dtype=float)
        shape = (self.height, self.width, 3)
        if o.shape != shape or d.shape != shape:
            raise ValidationError(f"ray grid arrays must have shape {shape}")
        norms = np.linalg.norm(d, axis=2)
        if np.max(np.abs(norms - 1.0)) > _ORTHO_TOL:
            raise ValidationError("grid directions must be unit vectors")
        object.__setattr__(self, "origins", frozen(o))
        object.__setattr__(self, "directions", frozen(d))


@dataclass(frozen=True)
class CameraModel:
    """A central or generic camera with its device-frame pose."""

    intrinsics: object  # CentralIntrinsics | GenericRayGrid
    pose: Pose = field(default_factory=Pose.identity)

    def __post_init__(self):
        if not isinstance(self.intrinsics, (CentralIntrinsics, GenericRayGrid)):
            raise ValidationError(
                "intrinsics must be CentralIntrinsics or GenericRayGrid"
            )

    @property
    def is_central(self):
        return isinstance(self.intrinsics, CentralIntrinsics)

    @property
    def width(self):
        return self.intrinsics.width

    @property
    def height(self):
        return self.intrinsics.height

    @property
    def position(self):
        """Device-frame position of the camera frame origin."""
        return self.pose.translation


@dataclass(frozen=True)
class Ray:
    """Device-frame ray with unit direction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        o = frozen(np.asarray(self.origin, dtype=float).reshape(3))
        d = np.asarray(self.direction, dtype=float).reshape(3)
        if abs(np.linalg.norm(d) - 1.0) > _ORTHO_TOL:
            raise ValidationError("ray direction must be a unit vector")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", frozen(d))

    def point_at(self, t):
        return self.origin + t * self.direction


@dataclass(frozen=True)
class PixelEmbedding:
    """Six-value per-pixel ray encoding (moment, direction).

    mode='standard' is the geometric Plucker pair (o x d, d) with
    moment perpendicular to direction; mode='paper' applies the rotation to
    the camera-frame moment before adding the translation, which is a
    different (non-Plucker) six-vector and is kept as an opaque embedding.
    """

    moment: np.ndarray
    direction: np.ndarray
    mode: str

    def __post_init__(self):
        m = frozen(np.asarray(self.moment, dtype=float).reshape(3))
        d = frozen(np.asarray(self.direction, dtype=float).reshape(3))
        if self.mode not in ("paper", "standard"):
            raise ValidationError("mode must be 'paper' or 'standard'")
        if self.mode == "standard":
            if abs(np.linalg.norm(d) - 1.0) > _ORTHO_TOL:
                raise ValidationError("standard-mode direction must be unit")
            if abs(float(m @ d)) > 1e-12:
                raise ValidationError(
                    "standard-mode moment must be perpendicular to direction"
                )
        object.__setattr__(self, "moment", m)
        object.__setattr__(self, "direction", d)


def _check_pixel(cam, pixel):
    u, v = float(pixel[0]), float(pixel[1])
    if not (0.0 <= u <= cam.width - 1 and 0.0 <= v <= cam.height - 1):
        raise DomainError(
            f"pixel ({u}, {v}) outside image domain "
            f"[0, {cam.width - 1}] x [0, {cam.height - 1}]"
        )
    return u, v


def _interp_grid(grid, u, v):
    """Bilinear camera-frame (origin, direction) at fractional pixel (u, v)."""
    u0 = min(int(np.floor(u)), grid.width - 2) if grid.width > 1 else 0
    v0 = min(int(np.floor(v)), grid.height - 2) if grid.height > 1 else 0
    fu = u - u0
    fv = v - v0
    w = np.array(
        [(1 - fu) * (1 - fv), fu * (1 - fv), (1 - fu) * fv, fu * fv]
    )
    idx = [(v0, u0), (v0, u0 + 1), (v0 + 1, u0), (v0 + 1, u0 + 1)]
    o = sum(wk * grid.origins[i, j] for wk, (i, j) in zip(w, idx))
    d = sum(wk * grid.directions[i, j] for wk, (i, j) in zip(w, idx))
    return o, unit(d)


def _camera_frame_ray(cam, pixel):
    """Camera-frame (origin, unit direction) for an in-bounds pixel."""
    u, v = _check_pixel(cam, pixel)
    if cam.is_central:
        intr = cam.intrinsics
        d = unit(np.array([(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0]))
        return np.zeros(3), d
    return _interp_grid(cam.intrinsics, u, v)


def unproject(cam, pixel):
    """Device-frame ray through an image pixel.

    :raises DomainError: pixel outside the image domain.
    """
    o, d = _camera_frame_ray(cam, pixel)
    r, t = cam.pose.rotation, cam.pose.translation
    return Ray(r @ o + t, r @ d)


def _ray_point_residual(point, origin, direction):
    """Perpendicular component of (point - origin) w.r.t. the ray, plus the
    signed depth along the ray."""
    rel = point - origin
    t = float(rel @ direction)
    return rel - t * direction, t


def project(cam, point, max_residual_mm=0.25):
    """Pixel coordinates imaging a device-frame point.

    Central cameras use the pinhole formula. Generic cameras search the ray
    grid for the pixel whose interpolated ray passes closest to the point:
    a stride-8 coarse scan seeds a damped Gauss-Newton refinement of the
    squared point-to-ray distance.

    :raises ProjectionError: point behind the camera, or (generic) no grid
        ray passes within ``max_residual_mm``.
    """
    point = np.asarray(point, dtype=float).reshape(3)
    r, t = cam.pose.rotation, cam.pose.translation
    if cam.is_central:
        intr = cam.intrinsics
        pc = r.T @ (point - t)
        if pc[2] <= 0:
            raise ProjectionError("point is behind the camera")
        return np.array(
            [intr.fx * pc[0] / pc[2] + intr.cx, intr.fy * pc[1] / pc[2] + intr.cy]
        )
    return _project_generic(cam, point, max_residual_mm)


def _project_generic(cam, point, max_residual_mm):
    grid = cam.intrinsics
    pc = cam.pose.rotation.T @ (point - cam.pose.translation)  # camera frame

    # Coarse seed: stride-8 scan over grid nodes.
    vs = np.arange(0, grid.height, 8)
    us = np.arange(0, grid.width, 8)
    o = grid.origins[np.ix_(vs, us)]
    d = grid.directions[np.ix_(vs, us)]
    rel = pc[None, None, :] - o
    tt = np.einsum("ijk,ijk->ij", rel, d)
    perp = rel - tt[:, :, None] * d
    dist2 = np.einsum("ijk,ijk->ij", perp, perp)
    dist2 = np.where(tt > 0, dist2, np.inf)
    if not np.isfinite(dist2).any():
        raise ProjectionError("point is behind the camera")
    iv, iu = np.unravel_index(np.argmin(dist2), dist2.shape)
    u, v = float(us[iu]), float(vs[iv])

    # Damped Gauss-Newton on (u, v); residual is the perpendicular offset.
    lam = 1e-3
    h = 0.25

    def residual(uu, vv):
        oo, dd = _interp_grid(grid, uu, vv)
        e, tt = _ray_point_residual(pc, oo, dd)
        return e, tt

    e, _ = residual(u, v)
    cost = float(e @ e)
    for _ in range(50):
        eu, _ = residual(min(u + h, grid.width - 1), v)
        eu2, _ = residual(max(u - h, 0.0), v)
        ev, _ = residual(u, min(v + h, grid.height - 1))
        ev2, _ = residual(u, max(v - h, 0.0))
        ju = (eu - eu2) / (min(u + h, grid.width - 1) - max(u - h, 0.0))
        jv = (ev - ev2) / (min(v + h, grid.height - 1) - max(v - h, 0.0))
        jac = np.column_stack([ju, jv])
        jtj = jac.T @ jac + lam * np.eye(2)
        step = np.linalg.solve(jtj, -jac.T @ e)
        u_new = float(np.clip(u + step[0], 0.0, grid.width - 1))
        v_new = float(np.clip(v + step[1], 0.0, grid.height - 1))
        e_new, t_new = residual(u_new, v_new)
        cost_new = float(e_new @ e_new)
        if cost_new < cost:
            if t_new <= 0:
                raise ProjectionError("point is behind the camera")
            u, v, e = u_new, v_new, e_new
            improvement = cost - cost_new
            cost = cost_new
            lam = max(lam / 10.0, 1e-12)
            if improvement < 1e-10:
                break
        else:
            lam *= 10.0
            if lam > 1e8:
                break
    if np.sqrt(cost) > max_residual_mm:
        raise ProjectionError(
            f"point lies outside ray-grid coverage "
            f"(residual {np.sqrt(cost):.3g} mm)"
        )
    return np.array([u, v])


def pixel_embedding(cam, pixel, mode="standard"):
    """Six-value ray embedding of a pixel; see PixelEmbedding for modes.

    :raises DomainError: pixel outside the image domain.
    """
    p, d = _camera_frame_ray(cam, pixel)
    r, t = cam.pose.rotation, cam.pose.translation
    if mode == "paper":
        return PixelEmbedding(r @ np.cross(p, d) + t, r @ d, "paper")
    if mode == "standard":
        o = r @ p + t
        dd = r @ d
        return PixelEmbedding(np.cross(o, dd), dd, "standard")
    raise DomainError(f"unknown embedding mode {mode!r}")


def epipolar_samples(cam_a, pixel, cam_b, depth_range, count):
    """Project depth samples of a pixel ray from camera A into camera B.

    Depths are sampled uniformly in inverse depth over ``depth_range`` so
    near-eye geometry is densely covered. Samples projecting behind camera B
    or outside its image are returned as None; ordering follows the depth
    samples (ascending depth).

    :returns: list of length ``count`` of pixel arrays or None.
    :raises DomainError: bad depth range or count < 2.
    """
    t_min, t_max = float(depth_range[0]), float(depth_range[1])
    if count < 2:
        raise DomainError("need at least 2 epipolar samples")
    if not (0.0 < t_min < t_max):
        raise DomainError("depth range must satisfy 0 < t_min < t_max")
    ray = unproject(cam_a, pixel)
    inv = np.linspace(1.0 / t_min, 1.0 / t_max, count)
    out = []
    for depth in 1.0 / inv:
        point = ray.point_at(depth)
        try:
            px = project(cam_b, point)
        except ProjectionError:
            out.append(None)
            continue
        if 0.0 <= px[0] <= cam_b.width - 1 and 0.0 <= px[1] <= cam_b.height - 1:
            out.append(px)
        else:
            out.append(None)
    return out


def look_at_pose(position, target, up=(0.0, 1.0, 0.0)):
    """Pose for a camera at ``position`` whose viewing axis points at
    ``target``; the image x axis is horizontal w.r.t. the ``up`` hint."""
    position = np.asarray(position, dtype=float)
    f = unit(np.asarray(target, dtype=float) - position)
    x = unit(np.cross(np.asarray(up, dtype=float), f))
    y = np.cross(f, x)
    return Pose(np.column_stack([x, y, f]), position)


def central_camera(fx, fy, cx, cy, width, height, pose=None):
    """Convenience constructor for a pinhole camera."""
    return CameraModel(
        CentralIntrinsics(fx, fy, cx, cy, width, height),
        pose if pose is not None else Pose.identity(),
    )


def grid_from_central(cam, origin_offset=None):
    """Generic-camera twin of a central camera, mainly for tests and the
    synthetic scene.

    :param origin_offset: optional callable (u, v) -> (3,) camera-frame ray
        origin, making the model non-central.
    """
    intr = cam.intrinsics
    if not isinstance(intr, CentralIntrinsics):
        raise DomainError("grid_from_central needs a central camera")
    us = np.arange(intr.width, dtype=float)
    vs = np.arange(intr.height, dtype=float)
    uu, vv = np.meshgrid(us, vs)
    d = np.stack(
        [(uu - intr.cx) / intr.fx, (vv - intr.cy) / intr.fy, np.ones_like(uu)],
        axis=2,
    )
    d /= np.linalg.norm(d, axis=2, keepdims=True)
    o = np.zeros_like(d)
    if origin_offset is not None:
        for v in range(intr.height):
            for u in range(intr.width):
                o[v, u] = origin_offset(float(u), float(v))
    grid = GenericRayGrid(intr.width, intr.height, o, d)
    return CameraModel(grid, cam.pose)
