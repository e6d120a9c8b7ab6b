"""Canonical report serialization: deterministic JSON (sorted keys, shortest
round-trip floats) and a flat CSV mode for table sweeps."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any


def _canonical(obj: Any) -> Any:
    """Recursively normalize for byte-stable serialization."""
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and obj == int(obj) and abs(obj) < 1e15:
        return obj
    if hasattr(obj, "to_json"):
        return _canonical(obj.to_json())
    if hasattr(obj, "item"):  # numpy scalar
        return _canonical(obj.item())
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, repr floats (full precision), LF end."""
    return json.dumps(_canonical(obj), sort_keys=True, indent=2) + "\n"


def entries_csv(entries: list[dict]) -> str:
    """Flatten homogeneous entry dicts into CSV (sorted column order)."""
    if not entries:
        return ""
    cols = sorted({k for e in entries for k in e})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for e in entries:
        writer.writerow([_csv_cell(e.get(c)) for c in cols])
    return buf.getvalue()


def _csv_cell(v: Any) -> Any:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}+{v.imag!r}j"
    return v


@dataclass
class SweepSpec:
    """A verification-sweep request: suite name, parameter ranges, seed.

    A fixed seed makes the report bytes identical run to run; tuples are
    enumerated in canonical sorted order regardless of the worker count.
    """

    suite: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    tolerance_scale: float = 1.0
    output_format: str = "json"
    jobs: int = 1

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "seed": self.seed,
            "tolerance_scale": self.tolerance_scale,
            "jobs": self.jobs,
        }
