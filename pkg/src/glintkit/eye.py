"""Two-sphere eye state, gaze axes, kappa calibration, and vergence.

The eye is modeled as a small corneal sphere pivoting about a larger
eyeball sphere. The optical axis runs from the eyeball center to the
corneal center; the visual axis is the optical axis rotated by the
per-user kappa angles and originates at the corneal center.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EstimationError, GeometryError, ValidationError
from .vecmath import frozen, unit

_KAPPA_BOUND_DEG = 15.0


@dataclass(frozen=True)
class EyeParams:
    """The 12-scalar eye state, all positions in the device frame (mm)."""

    p_e: np.ndarray  # eyeball center
    r_e: float       # eyeball (pivot) radius
    p_c: np.ndarray  # corneal center
    r_c: float       # corneal radius
    p_p: np.ndarray  # pupil center
    r_p: float       # pupil radius

    def __post_init__(self):
        for name in ("p_e", "p_c", "p_p"):
            object.__setattr__(
                self, name, frozen(np.asarray(getattr(self, name), dtype=float).reshape(3))
            )
        if min(self.r_e, self.r_c, self.r_p) <= 0:
            raise ValidationError("eye radii must be positive")
        if np.linalg.norm(self.p_c - self.p_e) <= 0:
            raise ValidationError("corneal center must differ from eyeball center")

    def as_vector(self):
        """Concatenated (p_e, r_e, p_c, r_c, p_p, r_p) as a 12-vector."""
        return np.concatenate(
            [self.p_e, [self.r_e], self.p_c, [self.r_c], self.p_p, [self.r_p]]
        )


@dataclass(frozen=True)
class Kappa:
    """Per-eye offset between the optical and visual axes, degrees.

    Positive alpha rotates the visual axis nasally: toward device +X for
    the left eye and toward -X for the right eye. Positive beta rotates
    toward device +Y (up).
    """

    alpha: float
    beta: float
    side: str

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValidationError("side must be 'left' or 'right'")
        if abs(self.alpha) > _KAPPA_BOUND_DEG or abs(self.beta) > _KAPPA_BOUND_DEG:
            raise ValidationError(
                f"kappa angles exceed the {_KAPPA_BOUND_DEG} deg sanity bound"
            )


@dataclass(frozen=True)
class GazeRay:
    """Gaze ray: origin at the corneal center, unit direction."""

    origin: np.ndarray
    direction: np.ndarray
    axis_kind: str  # 'optical' | 'visual'

    def __post_init__(self):
        o = frozen(np.asarray(self.origin, dtype=float).reshape(3))
        d = np.asarray(self.direction, dtype=float).reshape(3)
        if self.axis_kind not in ("optical", "visual"):
            raise ValidationError("axis_kind must be 'optical' or 'visual'")
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValidationError("gaze direction must be a unit vector")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", frozen(d))


def optical_axis(params):
    """Optical-axis gaze ray of an eye state.

    :raises GeometryError: coincident eyeball and corneal centers.
    """
    delta = params.p_c - params.p_e
    if np.linalg.norm(delta) <= 1e-9:
        raise GeometryError("eyeball and corneal centers coincide")
    return GazeRay(params.p_c, unit(delta), "optical")


def _eye_frame(direction):
    """Right/up/forward frame with forward along the gaze and up the device
    +Y projected orthogonal to it."""
    f = np.asarray(direction, dtype=float)
    up_hint = np.array([0.0, 1.0, 0.0])
    u = up_hint - (up_hint @ f) * f
    nu = np.linalg.norm(u)
    if nu < 1e-9:
        raise GeometryError("gaze direction parallel to device +Y")
    u = u / nu
    r = np.cross(u, f)
    return r, u, f


def _kappa_direction(optical_dir, alpha_deg, beta_deg, side):
    r, u, f = _eye_frame(optical_dir)
    sign = 1.0 if side == "left" else -1.0
    a = math.radians(alpha_deg) * sign
    b = math.radians(beta_deg)
    local = np.array(
        [math.sin(a) * math.cos(b), math.sin(b), math.cos(a) * math.cos(b)]
    )
    return local[0] * r + local[1] * u + local[2] * f


def apply_kappa(optical, kappa):
    """Visual axis obtained by rotating the optical axis by kappa.

    Yaw (alpha) then pitch (beta) in the eye-fixed frame whose forward axis
    is the optical direction; the origin is unchanged.

    :raises GeometryError: optical direction parallel to device +Y.
    """
    if optical.axis_kind != "optical":
        raise DomainError("apply_kappa expects an optical-axis ray")
    d = _kappa_direction(optical.direction, kappa.alpha, kappa.beta, kappa.side)
    return GazeRay(optical.origin, d, "visual")


def estimate_kappa(samples, side, max_iter=100):
    """Least-squares kappa angles from (optical ray, fixated target) pairs.

    Gauss-Newton from (0, 0) on the direction mismatch between the
    kappa-rotated optical axis and the unit vector from the gaze origin to
    the target.

    :param samples: sequence of (GazeRay, target point mm).
    :param side: 'left' or 'right'.
    :raises DomainError: empty sample list or target coincident with origin.
    :raises EstimationError: no convergence within ``max_iter`` iterations.
    """
    if len(samples) == 0:
        raise DomainError("estimate_kappa needs at least one sample")
    rays = []
    targets = []
    for ray, target in samples:
        target = np.asarray(target, dtype=float).reshape(3)
        if np.linalg.norm(target - ray.origin) <= 1e-9:
            raise DomainError("target coincides with the gaze origin")
        rays.append(ray)
        targets.append(unit(target - ray.origin))

    sign = 1.0 if side == "left" else -1.0
    frames = [_eye_frame(ray.direction) for ray in rays]

    def residuals_and_jac(alpha, beta):
        a = math.radians(alpha) * sign
        b = math.radians(beta)
        sa, ca = math.sin(a), math.cos(a)
        sb, cb = math.sin(b), math.cos(b)
        local = np.array([sa * cb, sb, ca * cb])
        dda = np.array([ca * cb, 0.0, -sa * cb]) * (sign * math.pi / 180.0)
        ddb = np.array([-sa * sb, cb, -ca * sb]) * (math.pi / 180.0)
        res = np.empty(3 * len(rays))
        jac = np.empty((3 * len(rays), 2))
        for i, ((r, u, f), t) in enumerate(zip(frames, targets)):
            basis = np.column_stack([r, u, f])
            res[3 * i : 3 * i + 3] = basis @ local - t
            jac[3 * i : 3 * i + 3, 0] = basis @ dda
            jac[3 * i : 3 * i + 3, 1] = basis @ ddb
        return res, jac

    x = np.zeros(2)
    converged = False
    res, jac = residuals_and_jac(*x)
    for _ in range(max_iter):
        try:
            step = np.linalg.solve(jac.T @ jac, -jac.T @ res)
        except np.linalg.LinAlgError as exc:
            raise EstimationError(
                "singular normal equations in kappa fit",
                residual=float(np.linalg.norm(res)),
            ) from exc
        x = x + step
        res, jac = residuals_and_jac(*x)
        if np.max(np.abs(step)) < 1e-12:
            converged = True
            break
    if not converged:
        raise EstimationError(
            "kappa estimation did not converge",
            residual=float(np.linalg.norm(res)),
        )
    return Kappa(float(x[0]), float(x[1]), side)


def fixation_point(left, right, p_z):
    """Binocular fixation point at a known depth plane.

    Each visual axis is extended to z = p_z and the two intersection points
    are averaged, so the output z equals p_z identically.

    :raises GeometryError: either gaze direction is grazing the depth plane.
    """
    if left.axis_kind != "visual" or right.axis_kind != "visual":
        raise DomainError("fixation_point expects visual-axis rays")
    point = np.zeros(3)
    for ray in (left, right):
        gz = ray.direction[2]
        if abs(gz) <= 1e-9:
            raise GeometryError("gaze direction grazes the fixation depth plane")
        s = (p_z - ray.origin[2]) / gz
        point += ray.origin + s * ray.direction
    point /= 2.0
    point[2] = p_z  # exact by construction; avoid the division round-trip
    return point


def triangulate_fixation(left, right):
    """Depth-free fixation estimate: midpoint of the shortest segment
    between the two gaze rays.

    :raises GeometryError: parallel rays.
    """
    d1, d2 = left.direction, right.direction
    cross = np.cross(d1, d2)
    denom = float(cross @ cross)
    if denom < (1e-9) ** 2:
        raise GeometryError("gaze rays are parallel")
    rel = right.origin - left.origin
    t1 = float(np.cross(rel, d2) @ cross) / denom
    t2 = float(np.cross(rel, d1) @ cross) / denom
    return 0.5 * ((left.origin + t1 * d1) + (right.origin + t2 * d2))


def convergence_distance(o_left, o_right, target):
    """Distance from the midpoint of the two corneal centers to the target."""
    o_left = np.asarray(o_left, dtype=float).reshape(3)
    o_right = np.asarray(o_right, dtype=float).reshape(3)
    target = np.asarray(target, dtype=float).reshape(3)
    return float(np.linalg.norm(0.5 * (o_left + o_right) - target))


def diopter_error(d_mm, d_hat_mm):
    """Vergence error |1/D - 1/D_hat| in diopters (distances in mm).

    :raises DomainError: nonpositive distance.
    """
    if d_mm <= 0 or d_hat_mm <= 0:
        raise DomainError("distances must be positive")
    return abs(1000.0 / d_mm - 1000.0 / d_hat_mm)
