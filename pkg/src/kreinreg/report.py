"""Verification records and reports shared by the checkers and the CLI."""

from __future__ import annotations

import math
import numbers
from dataclasses import asdict, dataclass, field
from typing import Any


def _encode(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _plain(i):
    # numpy integers become int so records serialise and compare cleanly
    return int(i) if isinstance(i, numbers.Integral) else i


def _decode(x):
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    return x


@dataclass(frozen=True)
class CheckRecord:
    name: str
    measured: float
    bound: float
    passed: bool
    index: Any = None
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "measured", float(self.measured))
        object.__setattr__(self, "bound", float(self.bound))
        object.__setattr__(self, "passed", bool(self.passed))
        if isinstance(self.index, (list, tuple)):
            object.__setattr__(self, "index", tuple(_plain(i) for i in self.index))
        else:
            object.__setattr__(self, "index", _plain(self.index))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measured"] = _encode(self.measured)
        d["bound"] = _encode(self.bound)
        if isinstance(self.index, tuple):
            d["index"] = list(self.index)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckRecord":
        return cls(d["name"], _decode(d["measured"]), _decode(d["bound"]), d["passed"],
                   d.get("index"), d.get("note", ""))


@dataclass
class Report:
    """Append-only list of check records plus run metadata."""

    scenario: str
    records: list[CheckRecord] = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    def check_le(self, name: str, measured: float, bound: float, index=None, note: str = "") -> CheckRecord:
        measured = float(measured)
        return self.add(CheckRecord(name, measured, float(bound), bool(measured <= bound), index, note))

    def check_ge(self, name: str, measured: float, bound: float, index=None, note: str = "") -> CheckRecord:
        measured = float(measured)
        return self.add(CheckRecord(name, measured, float(bound), bool(measured >= bound), index, note))

    def check_true(self, name: str, ok: bool, index=None, note: str = "") -> CheckRecord:
        return self.add(CheckRecord(name, 1.0 if ok else 0.0, 1.0, bool(ok), index, note))

    def extend(self, other: "Report", prefix: str = "") -> None:
        for r in other.records:
            self.add(CheckRecord(prefix + r.name, r.measured, r.bound, r.passed, r.index, r.note))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def get(self, name: str) -> CheckRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "records": [r.to_dict() for r in self.records],
            "environment": self.environment,
            "timing": self.timing,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["scenario"], [CheckRecord.from_dict(r) for r in d["records"]],
                   dict(d.get("environment", {})), dict(d.get("timing", {})))


_NUMBER = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["scenario", "records", "environment", "timing"],
    "additionalProperties": False,
    "properties": {
        "scenario": {"type": "string"},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "measured", "bound", "passed", "index", "note"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "measured": _NUMBER,
                    "bound": _NUMBER,
                    "passed": {"type": "boolean"},
                    "index": {"type": ["null", "integer", "string", "array"],
                              "items": {"type": ["integer", "string"]}},
                    "note": {"type": "string"},
                },
            },
        },
        "environment": {"type": "object"},
        "timing": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
    },
}
