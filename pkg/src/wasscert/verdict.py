"""Verdicts for a single ``lhs <= rhs`` comparison."""
import enum
import math

ATOL = 1e-7
RTOL = 1e-7


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    TIGHT = "Tight"
    VIOLATED = "Violated"
    UNVERIFIED = "HypothesesUnverified"

    def __str__(self):
        return self.value


def threshold(lhs, rhs, atol=ATOL, rtol=RTOL):
    scale = max(abs(lhs), abs(rhs)) if math.isfinite(lhs) and math.isfinite(rhs) else 0.0
    return max(atol, rtol * scale)


def classify(lhs, rhs, atol=ATOL, rtol=RTOL):
    """Numeric verdict for ``lhs <= rhs`` with slack ``rhs - lhs``."""
    if math.isnan(lhs) or math.isnan(rhs):
        return Verdict.VIOLATED
    if lhs == rhs:
        return Verdict.TIGHT
    slack = rhs - lhs
    tol = threshold(lhs, rhs, atol, rtol)
    if abs(slack) <= tol:
        return Verdict.TIGHT
    return Verdict.HOLDS if slack > 0 else Verdict.VIOLATED
