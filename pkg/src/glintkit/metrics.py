"""Evaluation metrics: angular accuracy, fixation-group precision, gaze
origin error, and vergence error, aggregated as subject-level Avg and P90
per eye tube (left / right / combined).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, DomainError
from .eye import diopter_error, fixation_point
from .vecmath import frozen, unit

TUBES = ("combine", "left", "right")
METRIC_COLUMNS = ("accuracy", "precision", "origin", "convergence")


@dataclass(frozen=True)
class GazePrediction:
    """Per-frame gaze prediction: per-eye visual rays and an optional
    combined fixation estimate."""

    subject_id: int
    frame_index: int
    left: object = None      # GazeRay | None
    right: object = None     # GazeRay | None
    group_id: int | None = None
    fixation: np.ndarray | None = None

    def __post_init__(self):
        if self.left is None and self.right is None:
            raise DomainError("prediction must carry at least one eye")
        if self.fixation is not None:
            object.__setattr__(
                self,
                "fixation",
                frozen(np.asarray(self.fixation, dtype=float).reshape(3)),
            )


@dataclass(frozen=True)
class MetricCell:
    """Avg/P90 pair for one metric; None when the metric is unavailable."""

    avg: float | None
    p90: float | None


@dataclass(frozen=True)
class EvaluationReport:
    """Table-style report: per tube, the Accuracy/Precision/Origin/
    Convergence quadruple with Avg and P90 rows."""

    camera_label: str
    cells: dict   # (tube, metric) -> MetricCell
    per_subject: dict = field(default_factory=dict)

    def cell(self, tube, metric):
        return self.cells.get((tube, metric), MetricCell(None, None))


def angular_error(g, g_hat):
    """Angle between two unit gaze directions, degrees.

    :raises DomainError: input deviates from unit norm by more than 1e-6.
    """
    g = np.asarray(g, dtype=float).reshape(3)
    g_hat = np.asarray(g_hat, dtype=float).reshape(3)
    if abs(np.linalg.norm(g) - 1.0) > 1e-6 or abs(np.linalg.norm(g_hat) - 1.0) > 1e-6:
        raise DomainError("angular_error expects unit vectors")
    return math.degrees(math.acos(float(np.clip(g @ g_hat, -1.0, 1.0))))


def p90(values):
    """Nearest-rank 90th percentile (1-based index ceil(0.9 n)).

    :raises DomainError: empty input.
    """
    values = sorted(values)
    if not values:
        raise DomainError("p90 of an empty list")
    return values[math.ceil(0.9 * len(values)) - 1]


def _group_precision(directions_by_group):
    """Mean over fixation groups of the sample std (deg) of angular
    deviations from the group-mean direction; None if no group has >= 2."""
    stds = []
    for dirs in directions_by_group.values():
        if len(dirs) < 2:
            continue
        mean_dir = unit(np.sum(dirs, axis=0))
        devs = [angular_error(d, mean_dir) for d in dirs]
        stds.append(float(np.std(devs, ddof=1)))
    return float(np.mean(stds)) if stds else None


def evaluate_report(predictions, ground_truth, camera_label="binocular"):
    """Score predictions against ground-truth records.

    Records pair up by (subject, frame). Left/right tubes score the
    per-eye visual axis and corneal-center origin; the combined tube scores
    the direction from the midpoint of the two predicted origins toward the
    fixation point (the prediction's own estimate, or the depth-plane
    intersection of its visual axes at the true target depth) and the
    vergence distance in diopters.

    Per-subject means are aggregated across subjects as Avg and
    nearest-rank P90. Precision needs fixation-group ids and groups of at
    least two frames; it is reported absent otherwise.

    :raises AlignmentError: a prediction has no ground-truth record.
    """
    gt_index = {(r.subject_id, r.frame_index): r for r in ground_truth}
    per_subject = {}
    for pred in predictions:
        key = (pred.subject_id, pred.frame_index)
        if key not in gt_index:
            raise AlignmentError(f"no ground truth for subject/frame {key}")
        record = gt_index[key]
        subject = per_subject.setdefault(
            pred.subject_id,
            {
                tube: {"accuracy": [], "origin": [], "convergence": [], "groups": {}}
                for tube in TUBES
            },
        )
        for side in ("left", "right"):
            ray = getattr(pred, side)
            if ray is None:
                continue
            gt_eye = record.eyes[side]
            acc = angular_error(ray.direction, gt_eye.visual.direction)
            origin = float(np.linalg.norm(ray.origin - gt_eye.params.p_c))
            subject[side]["accuracy"].append(acc)
            subject[side]["origin"].append(origin)
            if pred.group_id is not None:
                subject[side]["groups"].setdefault(pred.group_id, []).append(
                    np.asarray(ray.direction)
                )
        if pred.left is not None and pred.right is not None:
            midpoint = 0.5 * (pred.left.origin + pred.right.origin)
            fix = (
                pred.fixation
                if pred.fixation is not None
                else fixation_point(pred.left, pred.right, record.target[2])
            )
            pred_dir = unit(fix - midpoint)
            true_dir = unit(record.target - midpoint)
            gt_midpoint = 0.5 * (
                record.eyes["left"].params.p_c + record.eyes["right"].params.p_c
            )
            subject["combine"]["accuracy"].append(angular_error(pred_dir, true_dir))
            subject["combine"]["origin"].append(
                float(np.linalg.norm(midpoint - gt_midpoint))
            )
            subject["combine"]["convergence"].append(
                diopter_error(record.convergence, float(np.linalg.norm(fix - midpoint)))
            )
            if pred.group_id is not None:
                subject["combine"]["groups"].setdefault(pred.group_id, []).append(
                    pred_dir
                )

    if not per_subject:
        raise AlignmentError("no aligned prediction/ground-truth pairs")

    cells = {}
    subject_rows = {}
    for tube in TUBES:
        summary = {}
        for sid in sorted(per_subject):
            data = per_subject[sid][tube]
            if not data["accuracy"]:
                continue
            row = {
                "accuracy": float(np.mean(data["accuracy"])),
                "origin": float(np.mean(data["origin"])),
                "precision": _group_precision(data["groups"]),
                "convergence": (
                    float(np.mean(data["convergence"]))
                    if data["convergence"]
                    else None
                ),
            }
            summary[sid] = row
            subject_rows.setdefault(tube, {})[sid] = row
        for metric in METRIC_COLUMNS:
            vals = [
                row[metric] for row in summary.values() if row.get(metric) is not None
            ]
            if vals:
                cells[(tube, metric)] = MetricCell(float(np.mean(vals)), float(p90(vals)))
            else:
                cells[(tube, metric)] = MetricCell(None, None)
    return EvaluationReport(camera_label, cells, subject_rows)
