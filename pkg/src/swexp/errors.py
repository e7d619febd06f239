"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the documented domain of an operation."""


class ZeroMarginal(DomainError):
    """A conditional distribution was requested against a zero-probability symbol."""


class InfeasibleRate(DomainError):
    """A rate constraint cannot be met (e.g. requested mean rate <= 0)."""


class SourceSpecError(ValueError):
    """A joint-source specification violates its invariants."""


class ResourceError(RuntimeError):
    """The requested computation exceeds a hard enumeration cap."""


class DegenerateData(ValueError):
    """Input data admits no well-defined estimate (e.g. zero event rates).

    When raised by the exponent fit, the ``one_sided_slope`` attribute holds
    a fallback slope estimated from the strictly positive rates, if at least
    two such points exist; otherwise it is None.
    """

    def __init__(self, message, one_sided_slope=None):
        super().__init__(message)
        self.one_sided_slope = one_sided_slope
