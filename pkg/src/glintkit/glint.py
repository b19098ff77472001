"""Specular-glint simulation on the corneal sphere and its inverse:
glint/LED matching, corneal center and radius estimation, and multi-frame
eyeball fitting.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from . import camera as cam_mod
from .backend import specular_points
from .errors import (
    DomainError,
    EstimationError,
    GeometryError,
    InsufficientDataError,
    ProjectionError,
    ValidationError,
)
from .eye import EyeParams
from .vecmath import frozen, unit

_UNMATCHED_COST = 1e9
_FAILED_SIM_RESIDUAL = 1e3  # px, per component, when a paired glint vanishes


@dataclass(frozen=True)
class Led:
    """A point light source in the device frame."""

    id: int
    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "position", frozen(np.asarray(self.position, dtype=float).reshape(3))
        )


@dataclass(frozen=True)
class GlintObservation:
    """A detected glint: view index, pixel, and optional LED identity."""

    view: int
    pixel: np.ndarray
    led_id: int | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "pixel", frozen(np.asarray(self.pixel, dtype=float).reshape(2))
        )


@dataclass(frozen=True)
class FrameObservation:
    """All glints of one eye in one frame, across views."""

    side: str
    glints: tuple
    timestamp: int = 0

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValidationError("side must be 'left' or 'right'")
        glints = tuple(self.glints)
        seen = set()
        for g in glints:
            if g.led_id is not None:
                key = (g.view, g.led_id)
                if key in seen:
                    raise ValidationError(
                        f"duplicate glint for view {g.view}, LED {g.led_id}"
                    )
                seen.add(key)
        object.__setattr__(self, "glints", glints)


@dataclass(frozen=True)
class RigSide:
    """Per-eye rig half: calibrated cameras and LEDs in the device frame."""

    side: str
    cameras: tuple
    leds: tuple

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValidationError("side must be 'left' or 'right'")
        leds = tuple(self.leds)
        ids = [led.id for led in leds]
        if len(set(ids)) != len(ids):
            raise ValidationError("LED ids must be unique within a rig side")
        object.__setattr__(self, "cameras", tuple(self.cameras))
        object.__setattr__(self, "leds", leds)


@dataclass(frozen=True)
class CorneaEstimate:
    """Single-frame corneal estimate with the glint/LED assignment."""

    p_c: np.ndarray
    r_c: float
    assignment: dict  # glint index within the frame -> led id
    rms_residual: float
    converged: bool

    def __post_init__(self):
        object.__setattr__(
            self, "p_c", frozen(np.asarray(self.p_c, dtype=float).reshape(3))
        )
        if self.rms_residual < 0:
            raise ValidationError("rms residual must be nonnegative")


def reflect(d_in, n):
    """Mirror-reflect a unit direction about a unit surface normal."""
    d_in = np.asarray(d_in, dtype=float)
    n = np.asarray(n, dtype=float)
    return d_in - 2.0 * float(d_in @ n) * n


def reflection_angle_residual(point, p_c, led_pos, view_pos):
    """|incidence - reflection| angle (rad) at a corneal surface point."""
    n = unit(np.asarray(point) - np.asarray(p_c))
    v_l = unit(np.asarray(led_pos) - np.asarray(point))
    v_o = unit(np.asarray(view_pos) - np.asarray(point))
    a_in = np.arccos(np.clip(v_l @ n, -1.0, 1.0))
    a_out = np.arccos(np.clip(v_o @ n, -1.0, 1.0))
    return abs(a_in - a_out)


def simulate_glint(cornea, led, cam):
    """Specular point and image pixel of one LED on the corneal sphere.

    :param cornea: (p_c, r_c) pair, mm.
    :returns: (point mm, pixel px) or None when no camera-visible
        reflection exists or the projection fails.
    :raises GeometryError: LED or camera inside the corneal sphere.
    """
    p_c = np.asarray(cornea[0], dtype=float).reshape(3)
    r_c = float(cornea[1])
    if r_c <= 0:
        raise GeometryError("corneal radius must be positive")
    led_pos = led.position if isinstance(led, Led) else np.asarray(led, dtype=float)
    if np.linalg.norm(led_pos - p_c) <= r_c:
        raise GeometryError("LED lies inside the corneal sphere")

    if cam.is_central:
        view_pos = cam.position
        if np.linalg.norm(view_pos - p_c) <= r_c:
            raise GeometryError("camera lies inside the corneal sphere")
        pts = specular_points(view_pos, led_pos[None, :], p_c[None, :], r_c)
        point = pts[0, 0]
        if not np.all(np.isfinite(point)):
            return None
        try:
            pixel = cam_mod.project(cam, point)
        except ProjectionError:
            return None
        return point, pixel
    return _simulate_glint_generic(p_c, r_c, led_pos, cam)


def _simulate_glint_generic(p_c, r_c, led_pos, cam):
    """Fixed point on the effective viewpoint: solve against the ray origin
    of the pixel currently imaging the specular point."""
    grid = cam.intrinsics
    rot, t = cam.pose.rotation, cam.pose.translation
    view_pos = rot @ grid.origins.reshape(-1, 3).mean(axis=0) + t
    point = None
    for _ in range(25):
        if np.linalg.norm(view_pos - p_c) <= r_c:
            raise GeometryError("camera lies inside the corneal sphere")
        pts = specular_points(view_pos, led_pos[None, :], p_c[None, :], r_c)
        point = pts[0, 0]
        if not np.all(np.isfinite(point)):
            return None
        try:
            pixel = cam_mod.project(cam, point)
        except ProjectionError:
            return None
        ray = cam_mod.unproject(cam, pixel)
        if np.linalg.norm(ray.origin - view_pos) < 1e-12:
            break
        view_pos = ray.origin
    if point is None:
        return None
    if reflection_angle_residual(point, p_c, led_pos, view_pos) > 1e-9:
        return None
    return point, pixel


def _central_project_many(cam, points):
    """Vectorized pinhole projection; rows with nonpositive depth get NaN."""
    intr = cam.intrinsics
    pc = (points - cam.pose.translation) @ cam.pose.rotation
    z = pc[:, 2]
    ok = z > 0
    safe_z = np.where(ok, z, 1.0)
    px = np.column_stack(
        [intr.fx * pc[:, 0] / safe_z + intr.cx, intr.fy * pc[:, 1] / safe_z + intr.cy]
    )
    px[~ok] = np.nan
    return px


def _simulated_pixels(cam, led_positions, p_c, r_c):
    """Simulated glint pixels of many LEDs in one view; NaN where absent."""
    if cam.is_central:
        pts = specular_points(cam.position, led_positions, p_c[None, :], r_c)[0]
        pixels = np.full((len(led_positions), 2), np.nan)
        valid = np.all(np.isfinite(pts), axis=1)
        if valid.any():
            pixels[valid] = _central_project_many(cam, pts[valid])
        return pixels
    pixels = np.full((len(led_positions), 2), np.nan)
    for i, lp in enumerate(led_positions):
        res = _simulate_glint_generic(p_c, r_c, lp, cam)
        if res is not None:
            pixels[i] = res[1]
    return pixels


def simulate_frame(params, rig_side, timestamp=0):
    """Forward-simulate all glints of an eye state under a rig side.

    Emits one glint per (view, LED) whose specular reflection is visible
    and projects inside the image; the LED id is recorded as ground truth.
    """
    p_c, r_c = params.p_c, params.r_c
    glints = []
    for view, cam in enumerate(rig_side.cameras):
        for led in rig_side.leds:
            res = simulate_glint((p_c, r_c), led, cam)
            if res is None:
                continue
            _, pixel = res
            if 0 <= pixel[0] <= cam.width - 1 and 0 <= pixel[1] <= cam.height - 1:
                glints.append(GlintObservation(view, pixel, led.id))
    return FrameObservation(rig_side.side, tuple(glints), timestamp)


def match_glints(simulated, observed, gate):
    """Minimum-total-distance injective glint/LED assignment.

    Hungarian assignment on Euclidean pixel distance; pairs farther apart
    than ``gate`` are left unassigned (matched count is maximized first,
    then total distance minimized).

    :param simulated: sequence of (pixel, led_id).
    :param observed: sequence of pixels.
    :returns: dict mapping observed index -> led id.
    """
    if gate <= 0:
        raise DomainError("gate must be positive")
    if not simulated or not len(observed):
        return {}
    sim_px = np.asarray([np.asarray(p, dtype=float) for p, _ in simulated])
    obs_px = np.asarray([np.asarray(p, dtype=float) for p in observed])
    cost = np.linalg.norm(obs_px[:, None, :] - sim_px[None, :, :], axis=2)
    cost = np.where(np.isfinite(cost) & (cost <= gate), cost, _UNMATCHED_COST)
    rows, cols = linear_sum_assignment(cost)
    return {
        int(i): simulated[j][1]
        for i, j in zip(rows, cols)
        if cost[i, j] < _UNMATCHED_COST
    }


def _triangulate_rays(rays):
    """Least-squares point closest to a set of rays."""
    a = np.zeros((3, 3))
    b = np.zeros(3)
    for ray in rays:
        m = np.eye(3) - np.outer(ray.direction, ray.direction)
        a += m
        b += m @ ray.origin
    return np.linalg.lstsq(a, b, rcond=None)[0]


def _default_init(obs_by_view, rig_side, init_depth_mm):
    rays = []
    for view, obs in obs_by_view.items():
        if not obs:
            continue
        mean_px = np.mean([o.pixel for o in obs], axis=0)
        mean_px = np.clip(
            mean_px,
            0.0,
            [rig_side.cameras[view].width - 1, rig_side.cameras[view].height - 1],
        )
        rays.append(cam_mod.unproject(rig_side.cameras[view], mean_px))
    if len(rays) >= 2:
        return _triangulate_rays(rays)
    return rays[0].point_at(init_depth_mm)


class _CorneaProblem:
    """Shared state for the per-frame LM fit."""

    def __init__(self, rig_side, obs_by_view, r_c_fixed):
        self.rig_side = rig_side
        self.obs_by_view = obs_by_view
        self.r_c_fixed = r_c_fixed
        self.led_positions = np.asarray([led.position for led in rig_side.leds])
        self.led_ids = [led.id for led in rig_side.leds]
        self.id_to_idx = {led.id: i for i, led in enumerate(rig_side.leds)}
        self.n_obs = sum(len(v) for v in obs_by_view.values())

    def split(self, x):
        p_c = x[:3]
        r_c = self.r_c_fixed if self.r_c_fixed is not None else float(x[3])
        return p_c, r_c

    def sim_all(self, x):
        """Simulated pixels for every (view, LED) at state x."""
        p_c, r_c = self.split(x)
        return {
            view: _simulated_pixels(cam, self.led_positions, p_c, r_c)
            for view, cam in enumerate(self.rig_side.cameras)
        }

    def assign(self, x, gate):
        """Glint/LED assignment at state x: list of (view, obs_idx, led_idx)."""
        sims = self.sim_all(x)
        pairs = []
        for view, obs in self.obs_by_view.items():
            if not obs:
                continue
            sim = [
                (sims[view][i], self.led_ids[i])
                for i in range(len(self.led_ids))
                if np.all(np.isfinite(sims[view][i]))
            ]
            matched = match_glints(sim, [o.pixel for o in obs], gate)
            for obs_idx, led_id in matched.items():
                pairs.append((view, obs_idx, self.id_to_idx[led_id]))
        return sorted(pairs)

    def residuals(self, x, pairs):
        """Stacked pixel residuals (sim - observed) over assigned pairs."""
        p_c, r_c = self.split(x)
        out = np.empty(2 * len(pairs))
        by_view = {}
        for view, _, led_idx in pairs:
            by_view.setdefault(view, set()).add(led_idx)
        sim_cache = {}
        for view, led_idxs in by_view.items():
            idxs = sorted(led_idxs)
            px = _simulated_pixels(
                self.rig_side.cameras[view], self.led_positions[idxs], p_c, r_c
            )
            sim_cache[view] = dict(zip(idxs, px))
        for k, (view, obs_idx, led_idx) in enumerate(pairs):
            sim_px = sim_cache[view][led_idx]
            obs_px = self.obs_by_view[view][obs_idx].pixel
            if np.all(np.isfinite(sim_px)):
                out[2 * k : 2 * k + 2] = sim_px - obs_px
            else:
                out[2 * k : 2 * k + 2] = _FAILED_SIM_RESIDUAL
        return out


def _levenberg_marquardt(fun, x0, max_iter=200, rms_tol=1e-8, fd_step=1e-6):
    """Small dense LM with the fixed damping schedule (1e-3, x10 / /10)."""
    x = np.array(x0, dtype=float)
    res = fun(x)
    cost = float(res @ res)
    lam = 1e-3
    converged = False
    n = len(x)
    for _ in range(max_iter):
        jac = np.empty((len(res), n))
        for j in range(n):
            xp = x.copy()
            xp[j] += fd_step
            jac[:, j] = (fun(xp) - res) / fd_step
        jtj = jac.T @ jac
        g = jac.T @ res
        try:
            step = np.linalg.solve(jtj + lam * np.eye(n), -g)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        x_new = x + step
        res_new = fun(x_new)
        cost_new = float(res_new @ res_new)
        if cost_new < cost:
            rms_change = np.sqrt(cost / max(len(res), 1)) - np.sqrt(
                cost_new / max(len(res), 1)
            )
            x, res, cost = x_new, res_new, cost_new
            lam = max(lam / 10.0, 1e-12)
            if rms_change < rms_tol:
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                converged = True  # stalled at a (possibly local) minimum
                break
    rms = float(np.sqrt(cost / max(len(res), 1)))
    return x, rms, converged


def estimate_cornea(
    frame,
    rig_side,
    r_c_fixed=None,
    init=None,
    *,
    gate=None,
    noise_px=0.0,
    init_depth_mm=40.0,
    multi_start=True,
    early_exit_rms=1e-6,
):
    """Corneal center (and radius) from one frame of glint observations.

    Minimizes the pixel distance between simulated and observed glints by
    Levenberg-Marquardt, recomputing the glint/LED assignment between LM
    runs, with a 3x3x3 multi-start grid of +-5 mm about the initializer.

    :param r_c_fixed: corneal radius to hold fixed; fitted when None.
    :param init: initial center; derived from the observations when None.
    :param gate: assignment gate in px; defaults to max(3 * noise_px, 2).
    :raises InsufficientDataError: fewer than 3 glints in the frame.
    :raises EstimationError: no start produced a usable fit.
    """
    obs_by_view = {v: [] for v in range(len(rig_side.cameras))}
    for g in frame.glints:
        if g.view not in obs_by_view:
            raise ValidationError(f"glint references unknown view {g.view}")
        obs_by_view[g.view].append(g)
    problem = _CorneaProblem(rig_side, obs_by_view, r_c_fixed)
    if problem.n_obs < 3:
        raise InsufficientDataError(
            f"need at least 3 glints, got {problem.n_obs}"
        )
    if gate is None:
        gate = max(3.0 * noise_px, 2.0)
    if init is None:
        init = _default_init(obs_by_view, rig_side, init_depth_mm)
    init = np.asarray(init, dtype=float).reshape(3)
    r_init = r_c_fixed if r_c_fixed is not None else 7.8

    if multi_start:
        offsets = sorted(
            itertools.product((-5.0, 0.0, 5.0), repeat=3),
            key=lambda o: (np.linalg.norm(o), o),
        )
    else:
        offsets = [(0.0, 0.0, 0.0)]

    def run_start(x0, max_iter):
        # The first assignment is ungated: the initializer can sit millimeters
        # from the optimum, which moves simulated glints far beyond any
        # reasonable pixel gate. Gating only applies once LM has converged.
        x = x0
        pairs = problem.assign(x, np.inf)
        converged = False
        rms = np.inf
        for _ in range(5):
            if not pairs:
                return None
            x, rms, converged = _levenberg_marquardt(
                lambda xx: problem.residuals(xx, pairs), x, max_iter=max_iter
            )
            new_pairs = problem.assign(x, gate)
            if new_pairs == pairs:
                break
            pairs = new_pairs
        if not pairs:
            return None
        p_c, r_c = problem.split(x)
        if r_c <= 0:
            return None
        n_unmatched = problem.n_obs - len(pairs)
        penalized = rms**2 * len(pairs) + n_unmatched * (10.0 * gate) ** 2
        return (penalized, x, p_c.copy(), r_c, pairs, rms, converged)

    def is_exact(cand):
        _, _, _, _, pairs, rms, converged = cand
        return (
            converged
            and len(pairs) == problem.n_obs
            and rms < early_exit_rms
        )

    # Probe every start with a short LM budget, then spend the full budget
    # only on the most promising probes. A start in the right basin converges
    # almost immediately; the probe cap stops wrong basins from burning the
    # full iteration budget 27 times over.
    probes = []
    best = None
    for off in offsets:
        x0 = np.concatenate(
            [init + np.asarray(off), [] if r_c_fixed is not None else [r_init]]
        )
        cand = run_start(x0, max_iter=40)
        if cand is None:
            continue
        if is_exact(cand):
            best = cand
            break
        probes.append(cand)
    if best is None:
        probes.sort(key=lambda c: c[0])
        for cand in probes[:4]:
            polished = run_start(cand[1], max_iter=200) or cand
            if best is None or polished[0] < best[0]:
                best = polished
            if is_exact(polished):
                break

    if best is None:
        raise EstimationError("no multi-start point produced a glint match")
    _, _, p_c, r_c, pairs, rms, converged = best
    assignment = {}
    offsets_in_frame = {}
    for idx, g in enumerate(frame.glints):
        offsets_in_frame.setdefault(g.view, []).append(idx)
    for view, obs_idx, led_idx in pairs:
        assignment[offsets_in_frame[view][obs_idx]] = problem.led_ids[led_idx]
    return CorneaEstimate(p_c, float(r_c), assignment, rms, converged)


def fit_eyeball(centers, max_iter=100):
    """Sphere through a set of corneal centers: algebraic least squares
    followed by geometric Gauss-Newton refinement.

    :returns: (center, radius) of the pivot sphere.
    :raises InsufficientDataError: fewer than 4 points.
    :raises GeometryError: degenerate (rank-deficient) configuration.
    """
    pts = np.atleast_2d(np.asarray(centers, dtype=float))
    if pts.shape[0] < 4 or pts.shape[1] != 3:
        raise InsufficientDataError("sphere fit needs at least 4 points")
    a = np.column_stack([2.0 * pts, np.ones(len(pts))])
    b = np.einsum("ij,ij->i", pts, pts)
    sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 4:
        raise GeometryError("degenerate point configuration for sphere fit")
    center = sol[:3]
    r2 = sol[3] + float(center @ center)
    if r2 <= 0:
        raise GeometryError("algebraic sphere fit produced nonpositive radius")
    radius = float(np.sqrt(r2))

    x = np.concatenate([center, [radius]])
    for _ in range(max_iter):
        diff = pts - x[:3]
        dist = np.linalg.norm(diff, axis=1)
        if np.any(dist < 1e-12):
            break
        res = dist - x[3]
        jac = np.column_stack([-diff / dist[:, None], -np.ones(len(pts))])
        try:
            step = np.linalg.solve(jac.T @ jac, -jac.T @ res)
        except np.linalg.LinAlgError as exc:
            raise GeometryError("singular geometry in sphere refinement") from exc
        x = x + step
        if np.max(np.abs(step)) < 1e-12:
            break
    if x[3] <= 0:
        raise GeometryError("sphere refinement produced nonpositive radius")
    return x[:3], float(x[3])


@dataclass
class SequenceAnnotation:
    """Output of annotate_sequence: per-frame estimates plus the shared
    eyeball geometry."""

    cornea: list                 # CorneaEstimate | None per frame
    frame_errors: list           # str | None per frame
    r_c: float                   # shared corneal radius
    p_e: np.ndarray | None       # eyeball (pivot) center
    r_pivot: float | None        # pivot radius |p_e - p_c|
    eyes: list = field(default_factory=list)  # EyeParams | None per frame

    @property
    def eyeball_available(self):
        return self.p_e is not None


def annotate_sequence(
    frames,
    rig_side,
    r_c_fixed=None,
    *,
    noise_px=0.0,
    pupil_offset=4.2,
    pupil_radius=2.0,
    alternations=5,
):
    """Multi-frame annotation: shared-radius corneal fits, eyeball sphere,
    and per-frame eye parameters.

    Stage 1 alternates per-frame center estimation (shared radius held
    fixed) with a scalar refit of the shared radius against all frames.
    Stage 2 fits the pivot sphere to the corneal centers; stage 3 places
    optical axes and pupils. Eyeball-dependent fields stay unavailable when
    stage 2 preconditions fail; per-frame failures are recorded, not fatal.
    """
    n = len(frames)
    estimates = [None] * n
    errors = [None] * n
    gate = max(3.0 * noise_px, 2.0)

    def run_one(frame, r_fixed, init):
        return estimate_cornea(
            frame,
            rig_side,
            r_c_fixed=r_fixed,
            init=init,
            gate=gate,
            noise_px=noise_px,
            multi_start=init is None,
        )

    def run_pass(r_fixed):
        prev_center = None
        for i, frame in enumerate(frames):
            init = (
                estimates[i].p_c
                if estimates[i] is not None
                else prev_center
            )
            try:
                est = None
                if init is not None:
                    try:
                        est = run_one(frame, r_fixed, init)
                    except (EstimationError, GeometryError):
                        est = None
                    # A chained init can drop the single-start fit into a
                    # spurious minimum; fall back to the multi-start search
                    # whenever the fit looks worse than the pixel gate.
                    if est is not None and (
                        est.rms_residual > gate
                        or len(est.assignment) < len(frame.glints)
                    ):
                        est = None
                if est is None:
                    est = run_one(frame, r_fixed, None)
                estimates[i] = est
                errors[i] = None
                prev_center = est.p_c
            except (InsufficientDataError, EstimationError, GeometryError) as exc:
                estimates[i] = None
                errors[i] = str(exc)

    # Pass A: free radius (unless pinned), then share the median radius.
    run_pass(r_c_fixed)
    fitted = [e for e in estimates if e is not None]
    if not fitted:
        return SequenceAnnotation(estimates, errors, r_c_fixed or 7.8, None, None,
                                  [None] * n)
    shared_r = r_c_fixed if r_c_fixed is not None else float(
        np.median([e.r_c for e in fitted])
    )

    if r_c_fixed is None:
        for _ in range(alternations):
            run_pass(shared_r)
            new_r = _refit_shared_radius(frames, rig_side, estimates, shared_r, gate)
            if abs(new_r - shared_r) < 1e-9:
                shared_r = new_r
                break
            shared_r = new_r
        run_pass(shared_r)

    centers = [e.p_c for e in estimates if e is not None]
    p_e = r_pivot = None
    if len(centers) >= 4:
        try:
            p_e, r_pivot = fit_eyeball(centers)
        except (InsufficientDataError, GeometryError):
            p_e = r_pivot = None

    eyes = []
    for est in estimates:
        if est is None or p_e is None:
            eyes.append(None)
            continue
        g = unit(est.p_c - p_e)
        eyes.append(
            EyeParams(
                p_e=p_e,
                r_e=r_pivot,
                p_c=est.p_c,
                r_c=shared_r,
                p_p=est.p_c + pupil_offset * g,
                r_p=pupil_radius,
            )
        )
    return SequenceAnnotation(estimates, errors, shared_r, p_e, r_pivot, eyes)


def _refit_shared_radius(frames, rig_side, estimates, r0, gate):
    """Scalar radius minimizing the total glint residual with all frame
    centers and assignments held fixed."""
    fixed = []
    for frame, est in zip(frames, estimates):
        if est is None:
            continue
        obs_by_view = {v: [] for v in range(len(rig_side.cameras))}
        for g in frame.glints:
            obs_by_view[g.view].append(g)
        problem = _CorneaProblem(rig_side, obs_by_view, None)
        x = np.concatenate([est.p_c, [r0]])
        pairs = problem.assign(x, gate)
        fixed.append((problem, est.p_c, pairs))

    def total_cost(r):
        cost = 0.0
        for problem, p_c, pairs in fixed:
            if not pairs:
                continue
            res = problem.residuals(np.concatenate([p_c, [r]]), pairs)
            cost += float(res @ res)
        return cost

    result = minimize_scalar(
        total_cost,
        bounds=(max(0.5 * r0, 1.0), 1.5 * r0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(result.x)
