"""Experiment reports and their serialization."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import IoFailure

CSV_HEADER = ("parameter", "value", "reference", "abs_err", "rel_err")


@dataclass
class Check:
    value: float
    reference: float
    tolerance: float
    kind: str = "rel"  # "rel", "abs" or "bound" (value <= reference)

    @property
    def abs_err(self) -> float:
        return abs(self.value - self.reference)

    @property
    def rel_err(self) -> float:
        return self.abs_err / abs(self.reference) if self.reference != 0 else self.abs_err

    @property
    def passed(self) -> bool:
        if self.kind == "bound":
            return self.value <= self.reference + self.tolerance
        err = self.rel_err if self.kind == "rel" else self.abs_err
        return bool(err <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "reference": self.reference,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tolerance": self.tolerance,
            "kind": self.kind,
            "passed": self.passed,
        }


@dataclass
class Report:
    experiment: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    references: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    rows: list | None = None
    runtime_ms: float = 0.0

    def add_row(self, parameter, value, reference):
        if self.rows is None:
            self.rows = []
        abs_err = abs(value - reference)
        rel_err = abs_err / abs(reference) if reference != 0 else abs_err
        self.rows.append((parameter, value, reference, abs_err, rel_err))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self, include_runtime: bool = True) -> dict:
        outputs = dict(self.outputs)
        if self.rows is not None:
            outputs["rows"] = [dict(zip(CSV_HEADER, r)) for r in self.rows]
        d = {
            "experiment": self.experiment,
            "inputs": self.inputs,
            "outputs": outputs,
            "references": self.references,
            "errors": {k: c.to_dict() for k, c in self.checks.items()},
            "diagnostics": self.diagnostics,
        }
        if include_runtime:
            d["runtime_ms"] = self.runtime_ms
        return d


def _plain(x: Any):
    """Convert to JSON-ready builtins; complex numbers become ``[re, im]``."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_plain(float(x.real)), _plain(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return repr(x)
        return x
    return x


def to_json(report: Report, include_runtime: bool = True) -> str:
    # json writes floats with repr(), the shortest string that round-trips
    return json.dumps(_plain(report.to_dict(include_runtime)), sort_keys=True, indent=2, allow_nan=False) + "\n"


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows or []:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    v = _plain(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return json.dumps(v)
    return v


def report_digest(report: Report) -> str:
    """SHA-256 of the JSON form without ``runtime_ms``."""
    return hashlib.sha256(to_json(report, include_runtime=False).encode()).hexdigest()


def emit_report(report: Report, fmt: str = "json", path: str | Path | None = None) -> str:
    """Serialize ``report``; write it to ``path`` when given and return the text."""
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            p = Path(path)
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write report to {path}: {exc}") from exc
    return text
