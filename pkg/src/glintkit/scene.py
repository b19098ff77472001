"""Synthetic ground-truth scene generator.

Mirrors the acquisition geometry of a binocular near-eye rig: per-eye
camera pairs and a 14-LED ring, virtual targets uniform over +-30 deg of
yaw/pitch and 900-1500 mm of depth, and a two-sphere eye posed so its
visual axis passes through the target. Every inverse operation in the
toolkit is tested against records produced here.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import glint as glint_mod
from .camera import central_camera, look_at_pose
from .errors import DomainError, GeometryError, ValidationError
from .eye import EyeParams, GazeRay, Kappa, apply_kappa, fixation_point, optical_axis
from .glint import FrameObservation, GlintObservation, Led, RigSide
from .vecmath import frozen, unit


@dataclass(frozen=True)
class Rig:
    """Binocular rig: one RigSide per eye, shared device frame."""

    left: RigSide
    right: RigSide

    def __post_init__(self):
        if self.left.side != "left" or self.right.side != "right":
            raise ValidationError("rig sides must be tagged left/right")

    def side(self, side):
        return self.left if side == "left" else self.right


def _range_tuple(r):
    lo, hi = float(r[0]), float(r[1])
    if hi < lo:
        raise ValidationError(f"empty range ({lo}, {hi})")
    return (lo, hi)


@dataclass(frozen=True)
class SceneConfig:
    """Sampling ranges and noise level for synthetic sessions."""

    yaw_range: tuple = (-30.0, 30.0)       # deg
    pitch_range: tuple = (-30.0, 30.0)     # deg
    depth_range: tuple = (900.0, 1500.0)   # mm
    kappa_alpha_range: tuple = (-7.0, 7.0)  # deg
    kappa_beta_range: tuple = (-7.0, 7.0)   # deg
    r_c_range: tuple = (7.2, 8.4)           # mm
    pivot_radius_range: tuple = (4.7, 6.0)  # mm
    pupil_offset_range: tuple = (4.2, 4.2)  # mm
    pupil_radius_range: tuple = (1.0, 3.0)  # mm
    ipd_mm: float = 64.0
    eyebox_jitter_mm: float = 1.0
    glint_noise_px: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in (
            "yaw_range",
            "pitch_range",
            "depth_range",
            "kappa_alpha_range",
            "kappa_beta_range",
            "r_c_range",
            "pivot_radius_range",
            "pupil_offset_range",
            "pupil_radius_range",
        ):
            object.__setattr__(self, name, _range_tuple(getattr(self, name)))
        if self.glint_noise_px < 0:
            raise ValidationError("glint noise must be nonnegative")
        if self.depth_range[0] <= 0:
            raise ValidationError("depths must be positive")


@dataclass(frozen=True)
class EyeAnatomy:
    """Per-subject anatomical constants (mm)."""

    r_c: float
    pivot_radius: float
    pupil_offset: float
    pupil_radius: float


@dataclass(frozen=True)
class EyeGroundTruth:
    """Ground-truth eye state of one eye in one record."""

    params: EyeParams
    kappa: Kappa
    optical: GazeRay
    visual: GazeRay


@dataclass(frozen=True)
class GroundTruthRecord:
    """One synthetic frame: per-eye truth, target, and observations."""

    frame_index: int
    subject_id: int
    group_id: int
    split: str  # 'calib' | 'test'
    target: np.ndarray
    convergence: float
    eyes: dict          # side -> EyeGroundTruth
    observations: dict  # side -> FrameObservation

    def __post_init__(self):
        object.__setattr__(
            self, "target", frozen(np.asarray(self.target, dtype=float).reshape(3))
        )
        if self.split not in ("calib", "test"):
            raise ValidationError("split must be 'calib' or 'test'")


def default_rig(views_per_side=2, leds_per_side=14, image_size=(640, 480),
                focal_px=500.0):
    """Binocular rig with per-eye camera pairs and an LED ring, laid out in
    the device frame (+Z toward the scene, eyes near the origin)."""
    width, height = image_size
    sides = {}
    for side, sign in (("left", -1.0), ("right", 1.0)):
        eye_nominal = np.array([sign * 32.0, 0.0, 0.0])
        look_target = eye_nominal + np.array([0.0, 0.0, 5.0])
        cam_offsets = []
        for k in range(views_per_side):
            span = (k - (views_per_side - 1) / 2.0) * 20.0
            cam_offsets.append(np.array([span, -14.0, 38.0]))
        cameras = tuple(
            central_camera(
                focal_px,
                focal_px,
                (width - 1) / 2.0,
                (height - 1) / 2.0,
                width,
                height,
                look_at_pose(eye_nominal + off, look_target),
            )
            for off in cam_offsets
        )
        leds = tuple(
            Led(
                k,
                eye_nominal
                + np.array(
                    [
                        16.0 * math.cos(2 * math.pi * k / leds_per_side),
                        16.0 * math.sin(2 * math.pi * k / leds_per_side),
                        35.0,
                    ]
                ),
            )
            for k in range(leds_per_side)
        )
        sides[side] = RigSide(side, cameras, leds)
    return Rig(sides["left"], sides["right"])


def sample_eye_anatomy(cfg, rng):
    """Per-eye anatomy and kappa draws, uniform over the configured ranges.

    :returns: dict side -> (EyeAnatomy, Kappa).
    """
    out = {}
    for side in ("left", "right"):
        anatomy = EyeAnatomy(
            r_c=rng.uniform(*cfg.r_c_range),
            pivot_radius=rng.uniform(*cfg.pivot_radius_range),
            pupil_offset=rng.uniform(*cfg.pupil_offset_range),
            pupil_radius=rng.uniform(*cfg.pupil_radius_range),
        )
        kappa = Kappa(
            rng.uniform(*cfg.kappa_alpha_range),
            rng.uniform(*cfg.kappa_beta_range),
            side,
        )
        out[side] = (anatomy, kappa)
    return out


def sample_target(cfg, rng):
    """Device-frame target point: yaw/pitch/depth uniform in range."""
    yaw = math.radians(rng.uniform(*cfg.yaw_range))
    pitch = math.radians(rng.uniform(*cfg.pitch_range))
    depth = rng.uniform(*cfg.depth_range)
    return np.array([depth * math.tan(yaw), depth * math.tan(pitch), depth])


def _rotation_between(a, b):
    """Minimal rotation matrix taking unit vector a to unit vector b."""
    v = np.cross(a, b)
    c = float(a @ b)
    s2 = float(v @ v)
    if s2 < 1e-30:
        return np.eye(3) if c > 0 else -np.eye(3)
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx * ((1 - c) / s2)


def pose_eye_at_target(anatomy, kappa, p_e, target, max_iter=50):
    """Eye state whose visual axis passes through the target.

    Fixed-point iteration on the optical direction: start pointing at the
    target, then at each step rotate by the correction that sends the
    current visual axis onto the corneal-center-to-target direction.

    :raises GeometryError: coincident/behind target or non-convergence.
    """
    p_e = np.asarray(p_e, dtype=float).reshape(3)
    target = np.asarray(target, dtype=float).reshape(3)
    rel = target - p_e
    if np.linalg.norm(rel) <= 1e-9:
        raise GeometryError("target coincides with the eyeball center")
    if rel[2] <= 0:
        raise GeometryError("target is behind the eye")
    g = unit(rel)
    for _ in range(max_iter):
        p_c = p_e + anatomy.pivot_radius * g
        optical = GazeRay(p_c, g, "optical")
        visual = apply_kappa(optical, kappa)
        to_target = target - p_c
        miss = np.linalg.norm(np.cross(visual.direction, to_target))
        if miss < 1e-9 and float(visual.direction @ to_target) > 0:
            return EyeParams(
                p_e=p_e,
                r_e=anatomy.pivot_radius,
                p_c=p_c,
                r_c=anatomy.r_c,
                p_p=p_c + anatomy.pupil_offset * g,
                r_p=anatomy.pupil_radius,
            )
        g = unit(_rotation_between(visual.direction, unit(to_target)) @ g)
    raise GeometryError("eye posing did not converge")


def _verify_record(record, rig):
    """Construction self-checks on a freshly generated record."""
    vis = {}
    for side in ("left", "right"):
        gt = record.eyes[side]
        axis = optical_axis(gt.params)
        if np.linalg.norm(axis.direction - gt.optical.direction) > 1e-9:
            raise GeometryError("optical axis inconsistent with eye params")
        to_target = record.target - gt.visual.origin
        if np.linalg.norm(np.cross(gt.visual.direction, to_target)) > 1e-6:
            raise GeometryError("visual axis misses the target")
        vis[side] = gt.visual
    fix = fixation_point(vis["left"], vis["right"], record.target[2])
    if np.linalg.norm(fix - record.target) > 1e-6:
        raise GeometryError("fixation point inconsistent with the target")
    expected = float(
        np.linalg.norm(
            0.5 * (record.eyes["left"].params.p_c + record.eyes["right"].params.p_c)
            - record.target
        )
    )
    if abs(expected - record.convergence) > 1e-9:
        raise GeometryError("convergence distance inconsistent")
    for side in ("left", "right"):
        gt = record.eyes[side]
        cams = rig.side(side).cameras
        leds = {led.id: led for led in rig.side(side).leds}
        for g in record.observations[side].glints:
            res = glint_mod.simulate_glint(
                (gt.params.p_c, gt.params.r_c), leds[g.led_id], cams[g.view]
            )
            if res is None:
                raise GeometryError("recorded glint does not re-simulate")
            point, _ = res
            resid = glint_mod.reflection_angle_residual(
                point, gt.params.p_c, leds[g.led_id].position,
                cams[g.view].position if cams[g.view].is_central
                else cams[g.view].pose.translation,
            )
            if resid > 1e-9:
                raise GeometryError("glint violates the reflection law")


def generate_session(rig, cfg, n_calib, n_test, subject_id=0, *,
                     allow_over_budget=False, frames_per_test_target=1,
                     verify=True):
    """Full synthetic session for one subject.

    Fixed anatomy and kappa per subject; ``n_calib`` calibration targets
    with two frames each (the calibration-budget protocol) and ``n_test``
    test targets. Observations are noiseless; apply add_noise separately.

    :returns: (calibration records, test records).
    :raises DomainError: invalid counts, or n_calib > 20 without
        ``allow_over_budget``.
    """
    if n_calib < 0 or n_test < 0:
        raise DomainError("record counts must be nonnegative")
    if n_calib > 20 and not allow_over_budget:
        raise DomainError(
            "calibration budget is 20 points; pass allow_over_budget=True "
            "to exceed it"
        )
    rng = np.random.default_rng([cfg.seed, subject_id])
    anatomy = sample_eye_anatomy(cfg, rng)
    centers = {}
    for side, sign in (("left", -1.0), ("right", 1.0)):
        jitter = rng.uniform(-cfg.eyebox_jitter_mm, cfg.eyebox_jitter_mm, 3)
        centers[side] = np.array([sign * cfg.ipd_mm / 2.0, 0.0, 0.0]) + jitter

    frame_index = 0
    calib, test = [], []

    def make_records(split, group_id, n_frames, out):
        nonlocal frame_index
        target = sample_target(cfg, rng)
        eyes = {}
        for side in ("left", "right"):
            anat, kappa = anatomy[side]
            params = pose_eye_at_target(anat, kappa, centers[side], target)
            optical = optical_axis(params)
            eyes[side] = EyeGroundTruth(
                params, kappa, optical, apply_kappa(optical, kappa)
            )
        convergence = float(
            np.linalg.norm(
                0.5 * (eyes["left"].params.p_c + eyes["right"].params.p_c) - target
            )
        )
        for _ in range(n_frames):
            obs = {
                side: glint_mod.simulate_frame(
                    eyes[side].params, rig.side(side), timestamp=frame_index
                )
                for side in ("left", "right")
            }
            record = GroundTruthRecord(
                frame_index, subject_id, group_id, split, target, convergence,
                eyes, obs,
            )
            if verify:
                _verify_record(record, rig)
            out.append(record)
            frame_index += 1

    for k in range(n_calib):
        make_records("calib", k, 2, calib)
    for j in range(n_test):
        make_records("test", n_calib + j, frames_per_test_target, test)
    return calib, test


def add_noise(frames, sigma, rng):
    """Gaussian pixel noise on every glint; LED identities are stripped so
    downstream estimation must re-match."""
    if sigma < 0:
        raise DomainError("noise sigma must be nonnegative")
    out = []
    for frame in frames:
        glints = tuple(
            GlintObservation(g.view, g.pixel + sigma * rng.standard_normal(2), None)
            for g in frame.glints
        )
        out.append(FrameObservation(frame.side, glints, frame.timestamp))
    return out
