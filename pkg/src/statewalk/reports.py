"""Shared statistical test report record and its JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass
class TestReport:
    """Outcome of one named statistical check.

    ``passed`` already encodes the test's direction: conformance tests pass
    when p_value > alpha, designed-contrast tests (details["contrast"] true)
    pass when the violation is detected (p_value < alpha). Threshold-based
    checks document their margin in ``details``.
    """

    name: str
    statistic: float
    p_value: float
    alpha: float
    passed: bool
    samples: int
    seed: int
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": _jsonable(self.statistic),
            "p_value": _jsonable(self.p_value),
            "alpha": self.alpha,
            "passed": bool(self.passed),
            "samples": int(self.samples),
            "seed": int(self.seed),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TestReport":
        return cls(
            name=d["name"],
            statistic=d["statistic"],
            p_value=d["p_value"],
            alpha=d["alpha"],
            passed=d["passed"],
            samples=d["samples"],
            seed=d["seed"],
            details=dict(d.get("details", {})),
        )


def _jsonable(v):
    """Coerce numpy scalars and containers to plain JSON types."""
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and math.isnan(v):
        return None
    return v
