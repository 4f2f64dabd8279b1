"""Exception hierarchy shared by all modules."""


class WassCertError(Exception):
    """Base class for every error raised by the package."""


class InvalidPotential(WassCertError):
    pass


class NonIntegrable(WassCertError):
    pass


class DomainError(WassCertError, ValueError):
    pass


class AmbiguousMode(WassCertError):
    pass


class EmptyRestriction(WassCertError):
    pass


class DegenerateTarget(WassCertError):
    pass


class InadmissiblePair(WassCertError):
    """A dual pair violates the cost constraint at ``witness = (x, y, margin)``."""

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class MissingBounds(WassCertError):
    pass


class BoundMismatch(MissingBounds):
    """A declared convexity bound disagrees with sampled second derivatives."""


class HypothesisError(WassCertError):
    pass


class NotSpd(WassCertError, ValueError):
    pass


class DimensionError(WassCertError, ValueError):
    pass


class DegenerateCurve(WassCertError):
    pass


class NumericMonotonicityBreak(WassCertError):
    pass


class NotMonotone(WassCertError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SizeLimit(WassCertError):
    pass


class ConfigError(WassCertError):
    pass
