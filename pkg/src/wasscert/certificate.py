"""Signed-slack certificates for a single ``lhs <= rhs`` instance."""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from wasscert.verdict import ATOL, RTOL, Verdict, classify, threshold


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass(frozen=True)
class Certificate:
    inequality: str
    instance: str
    lhs: float
    rhs: float
    atol: float = ATOL
    rtol: float = RTOL
    error: float = 0.0
    reports: Tuple = ()
    hypotheses_verified: bool = True
    notes: Tuple[str, ...] = ()
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def numeric_verdict(self):
        return classify(self.lhs, self.rhs, self.atol, self.rtol)

    @property
    def verdict(self):
        v = self.numeric_verdict
        if not self.hypotheses_verified and v is not Verdict.VIOLATED:
            return Verdict.UNVERIFIED
        return v

    @property
    def tolerance(self):
        return threshold(self.lhs, self.rhs, self.atol, self.rtol)

    def to_dict(self):
        return {
            "inequality": self.inequality,
            "instance": self.instance,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "slack": _num(self.slack),
            "atol": self.atol,
            "rtol": self.rtol,
            "verdict": self.verdict.value,
            "numeric_verdict": self.numeric_verdict.value,
            "error": _num(self.error),
            "notes": list(self.notes),
            "reports": [r.to_dict() for r in self.reports],
            "extras": {k: _num(v) if isinstance(v, (int, float)) else v
                       for k, v in sorted(self.extras.items())},
        }
