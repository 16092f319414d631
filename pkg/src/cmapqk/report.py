"""Structured verification reports with a versioned JSON schema.

The timestamp lives in a single header field so that the remaining payload
is byte-for-byte reproducible for a fixed config and seed.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import jsonschema

REPORT_VERSION = "1.0"

CONVENTIONS = (
    "signature reported as (positive count, negative count); "
    "charts ordered (Re z, Im z, zt, zc[, s]) and (Re X, Im X, rho, phit, zt, zc)"
)

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "header", "checks", "summary"],
    "properties": {
        "version": {"type": "string"},
        "header": {
            "type": "object",
            "required": ["timestamp", "seed", "conventions", "config"],
            "properties": {
                "timestamp": {"type": "string"},
                "seed": {"type": "integer"},
                "conventions": {"type": "string"},
                "config": {"type": "object"},
            },
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "anchor", "points", "max_residual", "tolerance", "passed"],
                "properties": {
                    "name": {"type": "string"},
                    "anchor": {"type": "string"},
                    "points": {"type": "integer", "minimum": 0},
                    "max_residual": {"type": "number"},
                    "tolerance": {"type": "number"},
                    "passed": {"type": "boolean"},
                    "noise_floor": {"type": ["number", "null"]},
                    "meta": {"type": "object"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["total", "passed", "failed"],
            "properties": {
                "total": {"type": "integer"},
                "passed": {"type": "integer"},
                "failed": {"type": "integer"},
            },
        },
    },
}


@dataclass
class CheckRecord:
    """One verification check: what was asserted, over how many points, how it went."""

    name: str
    anchor: str
    points: int
    max_residual: float
    tolerance: float
    passed: bool
    noise_floor: float | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "points": int(self.points),
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
            "noise_floor": None if self.noise_floor is None else float(self.noise_floor),
            "meta": _jsonable(self.meta),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(obj)
    return str(obj)


@dataclass
class Report:
    seed: int
    config: dict
    checks: list[CheckRecord] = field(default_factory=list)
    timestamp: str = ""

    def finalize(self) -> None:
        if not self.timestamp:
            self.timestamp = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        self.finalize()
        passed = sum(1 for c in self.checks if c.passed)
        return {
            "version": REPORT_VERSION,
            "header": {
                "timestamp": self.timestamp,
                "seed": int(self.seed),
                "conventions": CONVENTIONS,
                "config": _jsonable(self.config),
            },
            "checks": [c.to_dict() for c in self.checks],
            "summary": {
                "total": len(self.checks),
                "passed": passed,
                "failed": len(self.checks) - passed,
            },
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def payload_json(self) -> str:
        """Deterministic payload: the full report with the timestamp removed."""
        d = self.to_dict()
        d["header"] = {k: v for k, v in d["header"].items() if k != "timestamp"}
        return json.dumps(d, indent=None, sort_keys=True)

    def validate(self) -> None:
        jsonschema.validate(self.to_dict(), REPORT_SCHEMA)
