"""File formats: rig description (JSON + binary ray-grid payloads),
line-delimited session/annotation records, kappa files, and report tables.

All numeric fields round-trip losslessly: floats are serialized with
Python's shortest-exact repr via the json module.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .camera import CameraModel, CentralIntrinsics, GenericRayGrid, Pose
from .errors import ParseError, ValidationError, VersionError
from .eye import EyeParams, GazeRay, Kappa
from .glint import FrameObservation, GlintObservation, Led, RigSide
from .metrics import METRIC_COLUMNS, TUBES
from .scene import EyeGroundTruth, GroundTruthRecord, Rig

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# rig files


def _vec(x):
    return [float(v) for v in np.asarray(x).ravel()]


def write_rig(rig, path):
    """Serialize a rig; generic ray grids go to sibling binary payloads
    (row-major origin+direction float64 pairs, little-endian)."""
    path = os.fspath(path)
    stem, _ = os.path.splitext(path)
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "rig",
        "device_frame": "right-handed, +Z toward scene, +X user-right, +Y up, mm",
        "sides": {},
    }
    for side_name in ("left", "right"):
        side = rig.side(side_name)
        cams = []
        for view, cam in enumerate(side.cameras):
            entry = {
                "width": cam.width,
                "height": cam.height,
                "pose": {
                    "R": [_vec(row) for row in cam.pose.rotation],
                    "T": _vec(cam.pose.translation),
                },
            }
            if cam.is_central:
                intr = cam.intrinsics
                entry["model"] = "central"
                entry.update(fx=intr.fx, fy=intr.fy, cx=intr.cx, cy=intr.cy)
            else:
                entry["model"] = "generic"
                payload = f"{os.path.basename(stem)}_{side_name}{view}.rays"
                entry["ray_grid"] = payload
                grid = cam.intrinsics
                data = np.concatenate([grid.origins, grid.directions], axis=2)
                data.astype("<f8").tofile(os.path.join(os.path.dirname(path) or ".", payload))
            cams.append(entry)
        doc["sides"][side_name] = {
            "cameras": cams,
            "leds": [
                {"id": led.id, "position": _vec(led.position)} for led in side.leds
            ],
        }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def parse_rig(path):
    """Load and validate a rig file.

    :raises ParseError: malformed document or missing field.
    :raises ValidationError: an invariant violation (e.g. det(R) != 1).
    :raises VersionError: unsupported schema version.
    """
    path = os.fspath(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if doc.get("schema") != SCHEMA_VERSION:
        raise VersionError(f"{path}: unsupported schema {doc.get('schema')!r}")
    sides = {}
    for side_name in ("left", "right"):
        try:
            side_doc = doc["sides"][side_name]
        except KeyError as exc:
            raise ParseError(f"{path}: missing side {side_name!r}") from exc
        cams = []
        for i, entry in enumerate(side_doc.get("cameras", [])):
            try:
                pose = Pose(
                    np.asarray(entry["pose"]["R"], dtype=float),
                    np.asarray(entry["pose"]["T"], dtype=float),
                )
                width, height = int(entry["width"]), int(entry["height"])
                if entry["model"] == "central":
                    intr = CentralIntrinsics(
                        entry["fx"], entry["fy"], entry["cx"], entry["cy"],
                        width, height,
                    )
                elif entry["model"] == "generic":
                    payload = os.path.join(
                        os.path.dirname(path) or ".", entry["ray_grid"]
                    )
                    if not os.path.exists(payload):
                        raise ParseError(
                            f"{path}: ray-grid payload {entry['ray_grid']!r} missing"
                        )
                    data = np.fromfile(payload, dtype="<f8")
                    if data.size != height * width * 6:
                        raise ValidationError(
                            f"{path}: ray grid {entry['ray_grid']!r} size does not "
                            f"match {width}x{height}"
                        )
                    data = data.reshape(height, width, 6)
                    intr = GenericRayGrid(width, height, data[..., :3], data[..., 3:])
                else:
                    raise ParseError(
                        f"{path}: camera {side_name}/{i}: unknown model "
                        f"{entry['model']!r}"
                    )
            except KeyError as exc:
                raise ParseError(
                    f"{path}: camera {side_name}/{i}: missing field {exc}"
                ) from exc
            cams.append(CameraModel(intr, pose))
        leds = []
        for j, entry in enumerate(side_doc.get("leds", [])):
            try:
                leds.append(Led(int(entry["id"]), np.asarray(entry["position"])))
            except KeyError as exc:
                raise ParseError(
                    f"{path}: led {side_name}/{j}: missing field {exc}"
                ) from exc
        sides[side_name] = RigSide(side_name, tuple(cams), tuple(leds))
    return Rig(sides["left"], sides["right"])


# ---------------------------------------------------------------------------
# session files


@dataclass(frozen=True)
class SessionRecord:
    """One session-file line: identifiers, per-eye observations, and an
    optional ground-truth block."""

    frame_index: int
    subject_id: int
    group_id: int
    split: str
    observations: dict  # side -> FrameObservation
    ground_truth: GroundTruthRecord | None = None

    @staticmethod
    def from_ground_truth(record, observations=None):
        return SessionRecord(
            record.frame_index,
            record.subject_id,
            record.group_id,
            record.split,
            observations if observations is not None else record.observations,
            record,
        )


def _ray_doc(ray):
    return {"origin": _vec(ray.origin), "direction": _vec(ray.direction)}


def _ray_from_doc(doc, kind):
    return GazeRay(np.asarray(doc["origin"]), np.asarray(doc["direction"]), kind)


def _record_doc(record):
    doc = {
        "frame": record.frame_index,
        "subject": record.subject_id,
        "group": record.group_id,
        "split": record.split,
        "obs": {},
    }
    for side, frame in record.observations.items():
        glints = []
        for g in frame.glints:
            entry = {"view": g.view, "pixel": _vec(g.pixel)}
            if g.led_id is not None:
                entry["led"] = g.led_id
            glints.append(entry)
        doc["obs"][side] = {"timestamp": frame.timestamp, "glints": glints}
    gt = record.ground_truth
    if gt is not None:
        eyes = {}
        for side, e in gt.eyes.items():
            eyes[side] = {
                "params": _vec(e.params.as_vector()),
                "kappa": [e.kappa.alpha, e.kappa.beta],
                "optical": _ray_doc(e.optical),
                "visual": _ray_doc(e.visual),
            }
        doc["gt"] = {
            "target": _vec(gt.target),
            "convergence": gt.convergence,
            "eyes": eyes,
        }
    return doc


def _record_from_doc(doc, lineno, path):
    try:
        observations = {}
        for side, obs in doc["obs"].items():
            glints = tuple(
                GlintObservation(
                    int(g["view"]), np.asarray(g["pixel"]), g.get("led")
                )
                for g in obs["glints"]
            )
            observations[side] = FrameObservation(side, glints, int(obs["timestamp"]))
        gt = None
        if "gt" in doc:
            eyes = {}
            for side, e in doc["gt"]["eyes"].items():
                p = np.asarray(e["params"], dtype=float)
                eyes[side] = EyeGroundTruth(
                    EyeParams(p[0:3], p[3], p[4:7], p[7], p[8:11], p[11]),
                    Kappa(e["kappa"][0], e["kappa"][1], side),
                    _ray_from_doc(e["optical"], "optical"),
                    _ray_from_doc(e["visual"], "visual"),
                )
            gt = GroundTruthRecord(
                int(doc["frame"]), int(doc["subject"]), int(doc["group"]),
                doc["split"], np.asarray(doc["gt"]["target"]),
                float(doc["gt"]["convergence"]), eyes, observations,
            )
        return SessionRecord(
            int(doc["frame"]), int(doc["subject"]), int(doc["group"]),
            doc["split"], observations, gt,
        )
    except KeyError as exc:
        raise ParseError(f"{path}:{lineno}: missing field {exc}") from exc


def write_session(records, path):
    """Write session records as line-delimited JSON with a header line."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"schema": SCHEMA_VERSION, "kind": "session"}))
        fh.write("\n")
        for record in records:
            if isinstance(record, GroundTruthRecord):
                record = SessionRecord.from_ground_truth(record)
            fh.write(json.dumps(_record_doc(record), sort_keys=True))
            fh.write("\n")


def read_session(path):
    """Read a session file back into SessionRecord objects.

    :raises VersionError: header schema mismatch.
    :raises ParseError: malformed or truncated line, with the line number.
    """
    records = []
    with open(path) as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:1: invalid header: {exc}") from exc
        if header.get("schema") != SCHEMA_VERSION:
            raise VersionError(
                f"{path}: unsupported schema {header.get('schema')!r}"
            )
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid record: {exc}") from exc
            records.append(_record_from_doc(doc, lineno, path))
    return records


# ---------------------------------------------------------------------------
# annotation files


def write_annotations(rows, path):
    """Write per-(subject, frame, side) annotation rows as JSON lines.

    Each row is a dict with keys: subject, frame, side, p_c, r_c, rms,
    converged, assignment, and optionally p_e, r_pivot, optical.
    """
    with open(path, "w") as fh:
        fh.write(json.dumps({"schema": SCHEMA_VERSION, "kind": "annotations"}))
        fh.write("\n")
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def read_annotations(path):
    with open(path) as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:1: invalid header: {exc}") from exc
        if header.get("schema") != SCHEMA_VERSION or header.get("kind") != "annotations":
            raise VersionError(f"{path}: not a supported annotations file")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid row: {exc}") from exc
    return rows


# ---------------------------------------------------------------------------
# kappa files


def write_kappa(kappas, path):
    """Write per-subject kappa angles. ``kappas``: {subject: {side: Kappa}}."""
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "kappa",
        "subjects": {
            str(subject): {
                side: {"alpha": k.alpha, "beta": k.beta}
                for side, k in sides.items()
            }
            for subject, sides in kappas.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_kappa(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if doc.get("schema") != SCHEMA_VERSION or doc.get("kind") != "kappa":
        raise VersionError(f"{path}: not a supported kappa file")
    out = {}
    for subject, sides in doc["subjects"].items():
        out[int(subject)] = {
            side: Kappa(entry["alpha"], entry["beta"], side)
            for side, entry in sides.items()
        }
    return out


# ---------------------------------------------------------------------------
# report files


def _fmt(value):
    return "" if value is None else repr(float(value))


def write_report(report, path):
    """Write the evaluation report as a CSV table (Table-2 column order)
    plus a machine-readable JSON twin at ``path + '.json'``."""
    lines = ["camera,tube,row,accuracy_deg,precision_deg,origin_mm,convergence_d"]
    for tube in TUBES:
        for row_name, attr in (("avg", "avg"), ("p90", "p90")):
            values = [
                _fmt(getattr(report.cell(tube, metric), attr))
                for metric in METRIC_COLUMNS
            ]
            lines.append(
                ",".join([report.camera_label, tube, row_name, *values])
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "report",
        "camera": report.camera_label,
        "cells": {
            f"{tube}/{metric}": {
                "avg": report.cell(tube, metric).avg,
                "p90": report.cell(tube, metric).p90,
            }
            for tube in TUBES
            for metric in METRIC_COLUMNS
        },
        "per_subject": report.per_subject,
    }
    with open(str(path) + ".json", "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
