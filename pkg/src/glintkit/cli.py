"""Command-line surface tying the pipeline together.

Subcommands: make-rig, simulate, annotate, calibrate, evaluate, epipolar.
Exit codes: 0 success, 1 pipeline error, 2 usage error. The environment
variable GLINTKIT_SEED overrides --seed when set.
"""

import argparse
import os
import sys

import numpy as np

from . import metrics as metrics_mod
from . import scene as scene_mod
from . import sessions
from .camera import epipolar_samples
from .errors import GlintKitError
from .eye import GazeRay, apply_kappa, estimate_kappa, optical_axis
from .glint import annotate_sequence


def _seed(args):
    env = os.environ.get("GLINTKIT_SEED")
    return int(env) if env else args.seed


def _cmd_make_rig(args):
    rig = scene_mod.default_rig(views_per_side=args.views,
                                leds_per_side=args.leds)
    sessions.write_rig(rig, args.out)
    print(f"wrote rig with {args.views} views and {args.leds} LEDs per side "
          f"to {args.out}")
    return 0


def _cmd_simulate(args):
    rig = sessions.parse_rig(args.rig)
    seed = _seed(args)
    cfg = scene_mod.SceneConfig(glint_noise_px=args.noise_px, seed=seed)
    records = []
    for subject in range(args.subjects):
        calib, test = scene_mod.generate_session(
            rig, cfg, args.calib, args.test, subject_id=subject
        )
        noise_rng = np.random.default_rng([seed, 999983, subject])
        for record in calib + test:
            noisy = {
                side: scene_mod.add_noise([frame], args.noise_px, noise_rng)[0]
                for side, frame in sorted(record.observations.items())
            }
            records.append(sessions.SessionRecord.from_ground_truth(record, noisy))
    records.sort(key=lambda r: (r.subject_id, r.frame_index))
    sessions.write_session(records, args.out)
    print(f"wrote {len(records)} records for {args.subjects} subjects to {args.out}")
    return 0


def _cmd_annotate(args):
    rig = sessions.parse_rig(args.rig)
    records = sessions.read_session(args.obs)
    by_subject = {}
    for rec in records:
        by_subject.setdefault(rec.subject_id, []).append(rec)
    rows = []
    for subject in sorted(by_subject):
        recs = sorted(by_subject[subject], key=lambda r: r.frame_index)
        for side in ("left", "right"):
            frames = [r.observations[side] for r in recs]
            ann = annotate_sequence(frames, rig.side(side), noise_px=args.noise_px)
            for rec, est, err, eye in zip(recs, ann.cornea, ann.frame_errors,
                                          ann.eyes):
                row = {"subject": subject, "frame": rec.frame_index, "side": side}
                if est is None:
                    row["error"] = err
                else:
                    row.update(
                        p_c=[float(v) for v in est.p_c],
                        r_c=est.r_c,
                        rms=est.rms_residual,
                        converged=est.converged,
                        assignment={str(k): v for k, v in sorted(est.assignment.items())},
                    )
                if ann.eyeball_available:
                    row["p_e"] = [float(v) for v in ann.p_e]
                    row["r_pivot"] = ann.r_pivot
                if eye is not None:
                    axis = optical_axis(eye)
                    row["optical"] = {
                        "origin": [float(v) for v in axis.origin],
                        "direction": [float(v) for v in axis.direction],
                    }
                rows.append(row)
    sessions.write_annotations(rows, args.out)
    n_ok = sum(1 for r in rows if "error" not in r)
    print(f"annotated {n_ok}/{len(rows)} (subject, frame, side) tuples "
          f"to {args.out}")
    return 0


def _load_annotation_axes(path):
    """(subject, frame, side) -> optical GazeRay from an annotations file."""
    axes = {}
    for row in sessions.read_annotations(path):
        if "optical" not in row:
            continue
        axes[(row["subject"], row["frame"], row["side"])] = GazeRay(
            np.asarray(row["optical"]["origin"]),
            np.asarray(row["optical"]["direction"]),
            "optical",
        )
    return axes


def _cmd_calibrate(args):
    if args.points > 20:
        print(
            f"warning: --points {args.points} exceeds the 20-point "
            "calibration budget; running anyway",
            file=sys.stderr,
        )
    axes = _load_annotation_axes(args.annotations)
    records = [r for r in sessions.read_session(args.gt) if r.split == "calib"]
    by_subject = {}
    for rec in records:
        if rec.ground_truth is None:
            raise GlintKitError(
                f"calibration record {rec.frame_index} lacks a ground-truth block"
            )
        by_subject.setdefault(rec.subject_id, []).append(rec)
    kappas = {}
    for subject in sorted(by_subject):
        recs = by_subject[subject]
        groups = sorted({r.group_id for r in recs})[: args.points]
        kappas[subject] = {}
        for side in ("left", "right"):
            samples = []
            for rec in recs:
                if rec.group_id not in groups:
                    continue
                key = (subject, rec.frame_index, side)
                if key in axes:
                    samples.append((axes[key], rec.ground_truth.target))
            if not samples:
                raise GlintKitError(
                    f"no annotated calibration frames for subject {subject} "
                    f"({side})"
                )
            kappas[subject][side] = estimate_kappa(samples, side)
    sessions.write_kappa(kappas, args.out)
    print(f"calibrated kappa for {len(kappas)} subjects to {args.out}")
    return 0


def _cmd_evaluate(args):
    axes = _load_annotation_axes(args.pred)
    kappas = sessions.read_kappa(args.kappa)
    records = [r for r in sessions.read_session(args.gt) if r.split == "test"]
    preds = []
    gts = []
    for rec in records:
        if rec.ground_truth is None:
            raise GlintKitError(
                f"test record {rec.frame_index} lacks a ground-truth block"
            )
        rays = {}
        for side in ("left", "right"):
            key = (rec.subject_id, rec.frame_index, side)
            if key in axes and rec.subject_id in kappas:
                rays[side] = apply_kappa(axes[key], kappas[rec.subject_id][side])
        if not rays:
            continue
        preds.append(
            metrics_mod.GazePrediction(
                rec.subject_id,
                rec.frame_index,
                left=rays.get("left"),
                right=rays.get("right"),
                group_id=rec.group_id,
            )
        )
        gts.append(rec.ground_truth)
    report = metrics_mod.evaluate_report(preds, gts)
    sessions.write_report(report, args.report)
    for tube in metrics_mod.TUBES:
        acc = report.cell(tube, "accuracy")
        origin = report.cell(tube, "origin")
        conv = report.cell(tube, "convergence")
        parts = [f"{tube}: accuracy {acc.avg:.6f} deg"]
        if origin.avg is not None:
            parts.append(f"origin {origin.avg:.6f} mm")
        if conv.avg is not None:
            parts.append(f"convergence {conv.avg:.6f} d")
        print(", ".join(parts))
    print(f"wrote report to {args.report}")
    return 0


def _cmd_epipolar(args):
    rig = sessions.parse_rig(args.rig)
    side = rig.side(args.side)
    try:
        cam_a = side.cameras[args.view]
        cam_b = side.cameras[args.target_view]
    except IndexError:
        raise GlintKitError("view index out of range for this rig side")
    pixel = [float(v) for v in args.pixel.split(",")]
    t_min, t_max = (float(v) for v in args.depths.split(","))
    samples = epipolar_samples(cam_a, pixel, cam_b, (t_min, t_max), args.samples)
    inv = np.linspace(1.0 / t_min, 1.0 / t_max, args.samples)
    for i, (depth, px) in enumerate(zip(1.0 / inv, samples)):
        if px is None:
            print(f"{i} {depth!r} invalid")
        else:
            print(f"{i} {depth!r} {px[0]!r} {px[1]!r}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="glintkit",
        description="Model-based 3D eye geometry pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-rig", help="write a default binocular rig file")
    p.add_argument("--out", required=True)
    p.add_argument("--views", type=int, default=2)
    p.add_argument("--leds", type=int, default=14)
    p.set_defaults(func=_cmd_make_rig)

    p = sub.add_parser("simulate", help="generate a synthetic session")
    p.add_argument("--rig", required=True)
    p.add_argument("--subjects", type=int, default=1)
    p.add_argument("--calib", type=int, default=20)
    p.add_argument("--test", type=int, default=50)
    p.add_argument("--noise-px", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("annotate", help="estimate eye geometry from glints")
    p.add_argument("--rig", required=True)
    p.add_argument("--obs", required=True)
    p.add_argument("--noise-px", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("calibrate", help="estimate per-subject kappa angles")
    p.add_argument("--annotations", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("evaluate", help="score annotations against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("epipolar", help="sample an epipolar curve")
    p.add_argument("--rig", required=True)
    p.add_argument("--side", choices=("left", "right"), default="left")
    p.add_argument("--view", type=int, required=True)
    p.add_argument("--pixel", required=True, help="u,v")
    p.add_argument("--target-view", type=int, required=True)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--depths", required=True, help="t_min,t_max in mm")
    p.set_defaults(func=_cmd_epipolar)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GlintKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
