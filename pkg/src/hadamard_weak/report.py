"""JSON and CSV serialization for points, witnesses and reports."""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable

from .core import InputError, Point, Space
from .properties import Fingerprint, Witness, WitnessKind
from .topology import ConvergenceReport, Mismatch

REPORT_KEYS = ("config", "verdict", "traces", "witnesses", "mismatches", "metadata")


def point_to_json(p: Point) -> list:
    return p.space.point_to_json(p)


def points_from_json(space: Space, items: Iterable) -> list[Point]:
    return [space.point_from_json(item) for item in items]


def witness_to_dict(w: Witness) -> dict[str, Any]:
    return {
        "kind": w.kind.value,
        "space": w.space.to_dict(),
        "points": {name: point_to_json(p) for name, p in w.points.items()},
        "values": dict(w.values),
        "seed": w.seed,
    }


def witness_from_dict(space: Space, obj: dict[str, Any]) -> Witness:
    try:
        kind = WitnessKind(obj["kind"])
        points = {name: space.point_from_json(p) for name, p in obj["points"].items()}
        values = {k: float(v) for k, v in obj["values"].items()}
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"malformed witness record: {exc}") from None
    return Witness(kind, points, values, obj.get("seed"))


def convergence_to_dict(report: ConvergenceReport) -> dict[str, Any]:
    return {
        "candidate": point_to_json(report.candidate),
        "probes": [point_to_json(p) for p in report.probes],
        "projected": [list(tr) for tr in report.traces],
        "strong": list(report.strong_trace),
        "epsilon": report.epsilon,
        "verdict": str(report.verdict),
    }


def convergence_rows(report: ConvergenceReport) -> list[dict[str, Any]]:
    """One row per (probe, index); indices are 1-based."""
    rows = []
    for j, tr in enumerate(report.traces):
        for k, value in enumerate(tr, start=1):
            rows.append(
                {
                    "probe": j,
                    "index": k,
                    "projected_distance": value,
                    "strong_distance": report.strong_trace[k - 1],
                }
            )
    return rows


def mismatch_to_dict(m: Mismatch) -> dict[str, Any]:
    return {"index": m.index, "z": point_to_json(m.z), "left": m.left, "right": m.right, "detail": m.detail}


def fingerprint_to_dict(fp: Fingerprint) -> dict[str, Any]:
    return {
        "base_set": [point_to_json(p) for p in fp.base_set],
        "geodesics": [list(pair) for pair in fp.geodesics],
        "values": [point_to_json(p) for p in fp.values],
        "params": list(fp.params),
    }


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
    return buf.getvalue()
