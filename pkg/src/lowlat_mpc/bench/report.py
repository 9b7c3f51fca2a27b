"""Benchmark report schema and serialization.

Every row carries the full session configuration so a single row is
enough to rerun it. Columns that do not apply to a scenario are null in
JSON and empty in CSV.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

FIELDS = (
    "scenario", "method", "function", "arity", "count", "points",
    "parties", "profile", "latency_ms", "bandwidth_gbps",
    "max_arity", "fxp_bits", "ring_bits", "seed", "coalesce",
    "exp_base", "exp_iterations", "log_order", "log_iterations",
    "reciprocal_iterations", "trig_iterations", "work_bits",
    "online_rounds", "online_bytes", "offline_bytes",
    "offline_elements", "mask_elements",
    "simulated_time_ms", "latency_time_ms", "transfer_time_ms",
    "max_abs_err_oracle", "mean_abs_err_oracle", "max_abs_err_true", "mean_abs_err_true",
    "within_budget", "agreement", "t_comp_s",
)

SCHEMA_VERSION = 1


@dataclass
class BenchReport:
    name: str
    rows: list = field(default_factory=list)

    def add(self, **values):
        unknown = set(values) - set(FIELDS)
        if unknown:
            raise KeyError(f"unknown report fields: {sorted(unknown)}")
        self.rows.append({k: values.get(k) for k in FIELDS})

    def extend(self, other: "BenchReport"):
        self.rows.extend(other.rows)

    def find(self, **match):
        return [r for r in self.rows if all(r[k] == v for k, v in match.items())]


def to_json(report: BenchReport) -> str:
    doc = {"schema": SCHEMA_VERSION, "report": report.name, "fields": list(FIELDS), "rows": report.rows}
    return json.dumps(doc, indent=2) + "\n"


def to_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def emit(report: BenchReport, format: str = "json", path=None) -> str:
    """Serialize ``report``; write it to ``path`` when given."""
    if format == "json":
        text = to_json(report)
    elif format == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {format!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def load(path) -> BenchReport:
    """Read back a JSON report written by ``emit``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("fields") != list(FIELDS):
        raise ValueError("report fields do not match this schema version")
    return BenchReport(doc["report"], doc["rows"])
