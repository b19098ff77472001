import math

import numpy as np
import pytest

from glintkit import scene
from glintkit.errors import AlignmentError, DomainError
from glintkit.eye import GazeRay, apply_kappa, optical_axis
from glintkit.metrics import (
    GazePrediction,
    angular_error,
    evaluate_report,
    p90,
)


def test_angular_error_exact_cases():
    z = np.array([0.0, 0.0, 1.0])
    assert angular_error(z, z) == 0.0
    diag = np.array([0.0, 1.0, 1.0]) / math.sqrt(2)
    assert abs(angular_error(z, diag) - 45.0) < 1e-12
    assert angular_error(z, -z) == 180.0


def test_angular_error_properties(rng):
    for _ in range(100):
        a = rng.standard_normal(3)
        b = rng.standard_normal(3)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        assert angular_error(a, b) == angular_error(b, a)
        # invariance under a common rotation (here: cyclic axis permutation)
        assert abs(
            angular_error(a, b) - angular_error(np.roll(a, 1), np.roll(b, 1))
        ) < 1e-9


def test_angular_error_non_unit():
    with pytest.raises(DomainError):
        angular_error([0, 0, 2.0], [0, 0, 1.0])


def test_p90_exact():
    assert p90(list(range(1, 11))) == 9
    assert p90([4.2]) == 4.2


def test_p90_empty():
    with pytest.raises(DomainError):
        p90([])


def test_p90_sort_oracle(rng):
    for _ in range(500):
        n = int(rng.integers(1, 40))
        vals = rng.standard_normal(n).tolist()
        expected = sorted(vals)[math.ceil(0.9 * n) - 1]
        assert p90(vals) == expected


def _gt_record(frame_index, subject_id, target, group_id="g0"):
    """Ground-truth record with both eyes fixating the target, zero kappa."""
    rig = scene.default_rig()
    cfg = scene.SceneConfig(
        kappa_alpha_range=(0.0, 0.0), kappa_beta_range=(0.0, 0.0),
        eyebox_jitter_mm=0.0, seed=subject_id,
    )
    anatomy = scene.sample_eye_anatomy(cfg, np.random.default_rng(subject_id))
    eyes = {}
    for side, sign in (("left", -1.0), ("right", 1.0)):
        p_e = np.array([sign * 32.0, 0.0, 0.0])
        params = scene.pose_eye_at_target(
            anatomy[side][0], anatomy[side][1], p_e, np.asarray(target, float)
        )
        opt = optical_axis(params)
        vis = apply_kappa(opt, anatomy[side][1])
        eyes[side] = scene.EyeGroundTruth(params, anatomy[side][1], opt, vis)
    mid = 0.5 * (eyes["left"].params.p_c + eyes["right"].params.p_c)
    return scene.GroundTruthRecord(
        frame_index=frame_index,
        subject_id=subject_id,
        group_id=group_id,
        split="test",
        target=np.asarray(target, float),
        convergence=float(np.linalg.norm(mid - np.asarray(target, float))),
        eyes=eyes,
        observations={},
    )


def _perfect_prediction(rec):
    return GazePrediction(
        rec.subject_id, rec.frame_index,
        left=rec.eyes["left"].visual, right=rec.eyes["right"].visual,
        group_id=rec.group_id,
    )


def test_evaluate_report_perfect():
    records = [
        _gt_record(i, 0, [100.0 * i - 100.0, 50.0, 1100.0], group_id=f"g{i}")
        for i in range(3)
    ]
    preds = [_perfect_prediction(r) for r in records]
    report = evaluate_report(preds, records)
    for tube in ("combine", "left", "right"):
        cell = report.cell(tube, "accuracy")
        assert cell.avg < 1e-6 and cell.p90 < 1e-6
    assert report.cell("left", "origin").avg < 1e-9
    assert report.cell("combine", "convergence").avg < 1e-9


def test_evaluate_report_hand_computed():
    # two subjects with constant 1 deg and 3 deg yaw offsets on both eyes
    records = []
    preds = []
    for subject, off_deg in ((0, 1.0), (1, 3.0)):
        for i in range(4):
            rec = _gt_record(i, subject, [0.0, 0.0, 1000.0 + 10.0 * i],
                             group_id=f"g{i}")
            records.append(rec)
            rays = {}
            for side in ("left", "right"):
                d = rec.eyes[side].visual.direction
                a = math.radians(off_deg)
                rot = np.array([
                    [math.cos(a), 0.0, math.sin(a)],
                    [0.0, 1.0, 0.0],
                    [-math.sin(a), 0.0, math.cos(a)],
                ])
                rays[side] = GazeRay(rec.eyes[side].visual.origin, rot @ d,
                                     "visual")
            preds.append(GazePrediction(subject, i, left=rays["left"],
                                        right=rays["right"], group_id=f"g{i}"))
    report = evaluate_report(preds, records)
    for side in ("left", "right"):
        cell = report.cell(side, "accuracy")
        assert abs(cell.avg - 2.0) < 1e-9   # mean of 1 and 3 over subjects
        assert abs(cell.p90 - 3.0) < 1e-9   # nearest-rank p90 of [1, 3]
        assert report.cell(side, "origin").avg < 1e-9


def test_evaluate_report_origin_scaling():
    records = [_gt_record(i, 0, [0.0, 0.0, 1000.0], group_id=f"g{i}")
               for i in range(3)]
    reports = []
    for k in (1.0, 2.5):
        preds = []
        for rec in records:
            rays = {
                side: GazeRay(
                    rec.eyes[side].visual.origin + np.array([k, 0.0, 0.0]),
                    rec.eyes[side].visual.direction, "visual",
                )
                for side in ("left", "right")
            }
            preds.append(GazePrediction(rec.subject_id, rec.frame_index,
                                        left=rays["left"], right=rays["right"],
                                        group_id=rec.group_id))
        reports.append(evaluate_report(preds, records))
    a = reports[0].cell("left", "origin").avg
    b = reports[1].cell("left", "origin").avg
    assert abs(a - 1.0) < 1e-9
    assert abs(b - 2.5) < 1e-9


def test_evaluate_report_precision_groups():
    # one group of 3 identical directions -> zero std; singleton group ignored
    records = [
        _gt_record(0, 0, [0.0, 0.0, 1000.0], group_id="a"),
        _gt_record(1, 0, [0.0, 0.0, 1000.0], group_id="a"),
        _gt_record(2, 0, [0.0, 0.0, 1000.0], group_id="a"),
        _gt_record(3, 0, [50.0, 0.0, 1100.0], group_id="b"),
    ]
    preds = [_perfect_prediction(r) for r in records]
    report = evaluate_report(preds, records)
    assert report.cell("left", "precision").avg < 1e-9


def test_evaluate_report_precision_absent_without_groups():
    records = [_gt_record(i, 0, [0.0, 0.0, 1000.0], group_id=f"g{i}")
               for i in range(3)]
    preds = [_perfect_prediction(r) for r in records]
    report = evaluate_report(preds, records)
    assert report.cell("left", "precision").avg is None


def test_evaluate_report_permutation_invariant():
    records = [_gt_record(i, 0, [30.0 * i, 0.0, 1000.0], group_id=f"g{i}")
               for i in range(4)]
    preds = [_perfect_prediction(r) for r in records]
    a = evaluate_report(preds, records)
    b = evaluate_report(list(reversed(preds)), list(reversed(records)))
    assert a.cells.keys() == b.cells.keys()
    for key in a.cells:
        assert a.cells[key] == b.cells[key]


def test_evaluate_report_misaligned():
    rec = _gt_record(0, 0, [0.0, 0.0, 1000.0])
    pred = _perfect_prediction(rec)
    bad = GazePrediction(5, 9, left=pred.left, right=pred.right,
                         group_id="g0")
    with pytest.raises(AlignmentError):
        evaluate_report([bad], [rec])
