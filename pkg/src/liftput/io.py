"""Reading and writing joint distributions (CSV and JSON)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .prob import JointDistribution, validate_joint


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def read_joint_csv(path, renormalize: bool = False) -> JointDistribution:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(c) for c in rec])
            except ValueError as exc:
                raise ValidationError(f"{path}: non-numeric cell in {rec!r}") from exc
    if len({len(r) for r in rows}) > 1:
        raise ValidationError(f"{path}: ragged rows")
    return validate_joint(rows, renormalize=renormalize)


def write_joint_csv(joint: JointDistribution, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in joint.table:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_joint_json(path, renormalize: bool = False) -> JointDistribution:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("joint")
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ValidationError(f"{path}: expected nested arrays")
    if len({len(r) for r in data}) > 1:
        raise ValidationError(f"{path}: ragged rows")
    return validate_joint(np.array(data, dtype=float), renormalize=renormalize)


def write_joint_json(joint: JointDistribution, path) -> None:
    # json emits repr() floats, which round-trip exactly
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(joint.table.tolist(), fh)
        fh.write("\n")


def read_joint(path, renormalize: bool = False) -> JointDistribution:
    if Path(path).suffix.lower() == ".json":
        return read_joint_json(path, renormalize)
    return read_joint_csv(path, renormalize)
