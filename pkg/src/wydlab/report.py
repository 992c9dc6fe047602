"""Run reports: aggregation of gap rows plus JSON/CSV serialization.

The JSON file is the full report; the CSV is a flat table
(suite, check, p, d, seed, gap, verdict) meant for gap-vs-p sweeps.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

CSV_COLUMNS = ("suite", "check", "p", "d", "seed", "index", "gap", "verdict", "near_zero")


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


@dataclass
class RunReport:
    """Config echo, one row per executed check, per-suite summary counts."""

    config: dict
    rows: list  # dicts with at least the CSV_COLUMNS keys
    degraded: bool = False
    versions: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.versions:
            self.versions = {"numpy": np.__version__, "wydlab": _package_version()}

    @property
    def summary(self) -> dict:
        out = {}
        for row in self.rows:
            bucket = out.setdefault(
                row["suite"], {"pass": 0, "fail": 0, "near_zero": 0, "degraded": 0}
            )
            if row.get("degraded"):
                bucket["degraded"] += 1
            elif row["verdict"]:
                bucket["pass"] += 1
                if row.get("near_zero"):
                    bucket["near_zero"] += 1
            else:
                bucket["fail"] += 1
        return out

    @property
    def failed(self) -> bool:
        return any(not r["verdict"] and not r.get("degraded") for r in self.rows)

    def to_dict(self) -> dict:
        return _plain(
            {
                "config": self.config,
                "summary": self.summary,
                "degraded": self.degraded,
                "versions": self.versions,
                "rows": self.rows,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow([_csv_cell(row.get(c)) for c in CSV_COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        rep = cls(data["config"], data["rows"], data["degraded"], data["versions"])
        return rep


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _package_version() -> str:
    from . import __version__

    return __version__


def emit(report: RunReport, fmt: str, path) -> None:
    """Write the report to ``path`` as JSON or CSV."""
    if fmt == "json":
        text = report.to_json()
    elif fmt == "csv":
        text = report.to_csv()
    else:
        raise InputError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
