"""Named pass/fail checks and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class Check:
    name: str
    value: float
    target: float | None = None
    tolerance: float | None = None
    passed: bool = False
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tgt = "" if self.target is None else f" target={self.target:.6g}"
        tol = "" if self.tolerance is None else f" tol={self.tolerance:.3g}"
        note = f" ({self.note})" if self.note else ""
        return f"[{status}] {self.name}: value={self.value:.6g}{tgt}{tol}{note}"


def relative_check(name, value, target, tol, note="") -> Check:
    ok = math.isfinite(value) and abs(value - target) <= tol * abs(target)
    return Check(name, float(value), float(target), tol, bool(ok), note)


def bound_check(name, value, bound, *, upper=True, note="") -> Check:
    """value <= bound (upper) or value >= bound."""
    ok = value <= bound if upper else value >= bound
    return Check(name, float(value), float(bound), None, bool(ok and math.isfinite(value)), note)


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "data": self.data,
        }

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.as_dict(), indent=2, sort_keys=True, default=_jsonable) + "\n")
        return path

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _jsonable(x):
    try:
        return float(x)
    except (TypeError, ValueError):
        return str(x)
