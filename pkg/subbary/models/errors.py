"""
Exception hierarchy for subbary.

InputError subclasses describe bad input (CLI exit code 2), DomainError
subclasses describe well-formed input outside an operation's domain (exit 3).
"""


class SubbaryError(Exception):
    """Base class for every error raised by subbary"""


class InputError(SubbaryError):
    """Malformed or unusable input"""


class DomainError(SubbaryError, ValueError):
    """Input outside the domain of an operation"""


class EmptyInput(InputError):
    """No points (or no records) were supplied"""


class DegenerateBody(InputError):
    """Point set whose convex hull is not full-dimensional"""


class ParseError(InputError):
    """A file or value could not be parsed; `field` names the culprit"""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class InvalidProfile(InputError):
    """Profile data violating concavity or non-negativity"""

    def __init__(self, message: str, index: int = -1):
        super().__init__(f"breakpoint {index}: {message}" if index >= 0 else message)
        self.index = index


class InvalidConfig(InputError):
    """Settings or suite configuration out of range"""


class EmptySlice(DomainError):
    """Half-space slice of zero volume"""


class OutOfSupport(DomainError):
    """Threshold outside the support [min p, max p] of a body"""

    def __init__(self, t, lower, upper):
        super().__init__(f"t outside support [{lower}, {upper}]: t = {t}")
        self.t = t
        self.lower = lower
        self.upper = upper


class DimensionTooLow(DomainError):
    """Operation needs a higher ambient dimension"""


class EmptyCandidates(DomainError):
    """No candidate valuations were supplied"""


class UndefinedRatio(DomainError):
    """A ratio A/S with S = 0 was requested"""


class GenerationExhausted(DomainError):
    """Random generator failed to produce a valid instance"""


class InvalidValuation(InputError):
    """Valuation record with unusable A, scale or Okounkov body"""
