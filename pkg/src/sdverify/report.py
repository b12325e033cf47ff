"""Check records and reports shared by the modules and the CLI."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

STATUSES = ("pass", "fail", "rejected", "unresolved")


def render(x) -> str:
    """Exact text for ints, Fractions and nested containers."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, Fraction)):
        return str(x)
    if isinstance(x, (list, tuple)):
        return "(" + ", ".join(render(v) for v in x) + ")"
    return str(x)


@dataclass
class IdentityCheck:
    id: str
    description: str
    ref: str
    status: str
    lhs: str = ""
    rhs: str = ""
    runtime: str = "0"
    note: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @classmethod
    def compare(cls, id, description, ref, lhs, rhs, note=""):
        """pass iff lhs == rhs exactly."""
        status = "pass" if lhs == rhs else "fail"
        return cls(id, description, ref, status, render(lhs), render(rhs), note=note)

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass
class Report:
    version: str
    models: list[dict] = field(default_factory=list)
    checks: list[IdentityCheck] = field(default_factory=list)

    def summary(self) -> dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for c in self.checks:
            out[c.status] += 1
        out["total"] = len(self.checks)
        return out

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "models": self.models,
            "checks": [asdict(c) for c in self.checks],
            "summary": {k: str(v) for k, v in self.summary().items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, doc: dict) -> "Report":
        rep = cls(doc["version"], list(doc.get("models", [])), [IdentityCheck(**c) for c in doc["checks"]])
        claimed = {k: int(v) for k, v in doc.get("summary", {}).items()}
        if claimed and claimed != rep.summary():
            raise ValueError("summary counts disagree with the check list")
        return rep

    def __eq__(self, other):
        return isinstance(other, Report) and self.to_json() == other.to_json()


def validate_report_json(doc: dict) -> None:
    """Lightweight schema check for a serialized report."""
    if not isinstance(doc, dict):
        raise ValueError("report must be an object")
    for key in ("version", "models", "checks", "summary"):
        if key not in doc:
            raise ValueError(f"missing key {key!r}")
    fields = {"id", "description", "ref", "status", "lhs", "rhs", "runtime", "note"}
    for c in doc["checks"]:
        if set(c) != fields:
            raise ValueError(f"check has fields {sorted(c)}")
        if c["status"] not in STATUSES:
            raise ValueError(f"bad status {c['status']!r}")
        if not all(isinstance(c[k], str) for k in fields):
            raise ValueError("all check fields are strings")
    for v in doc["summary"].values():
        int(v)
