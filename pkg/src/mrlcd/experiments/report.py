"""Experiment reports: canonical JSON and CSV summary tables."""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

__all__ = ["SCHEMA_VERSION", "ExperimentReport", "code_version"]

SCHEMA_VERSION = 1


def code_version():
    try:
        return metadata.version("mrlcd")
    except metadata.PackageNotFoundError:
        return "unknown"


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


@dataclass
class ExperimentReport:
    """``violations`` counts failed exact checks or assertions; ``passed`` is ``violations == 0``.

    ``table`` holds the CSV summary rows (one per eps, per trial, ...).
    ``wall_clock`` is kept out of the canonical serialization.
    """

    name: str
    config: dict
    summary: dict
    records: list = field(default_factory=list)
    table: list = field(default_factory=list)
    violations: int = 0
    wall_clock: float = 0.0

    @property
    def passed(self):
        return self.violations == 0

    def to_dict(self, wall_clock=True):
        d = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "code_version": code_version(),
            "config": self.config,
            "summary": self.summary,
            "violations": self.violations,
            "passed": self.passed,
            "records": self.records,
            "table": self.table,
        }
        if wall_clock:
            d["wall_clock_seconds"] = self.wall_clock
        return _plain(d)

    def canonical_json(self):
        """Deterministic JSON without the wall-clock field."""
        return json.dumps(self.to_dict(wall_clock=False), sort_keys=True, indent=1)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def to_csv(self):
        rows = _plain(self.table)
        if not rows:
            return ""
        cols = []
        for r in rows:
            cols.extend(k for k in r if k not in cols)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()

    def write(self, out):
        """Write ``<out>.json`` and, when there is a table, ``<out>.csv``."""
        stem = out[:-5] if out.endswith(".json") else out
        with open(stem + ".json", "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")
        text = self.to_csv()
        if text:
            with open(stem + ".csv", "w") as fh:
                fh.write(text)
        return stem + ".json"
