"""Exception hierarchy shared by every nashlab module."""


class NashLabError(Exception):
    """Base class for all analysis errors."""


class ParseError(NashLabError, ValueError):
    """Malformed polynomial or expression text."""

    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        if text:
            message = f"{message} at position {pos}\n  {text}\n  {' ' * pos}^"
        super().__init__(message)


class UnknownVariable(ParseError):
    pass


class DimensionMismatch(NashLabError, ValueError):
    pass


class ZeroPolynomial(NashLabError, ValueError):
    pass


class BasePointNotOnVariety(NashLabError, ValueError):
    pass


class RankDeficient(NashLabError, ValueError):
    pass


class UnsupportedSpec(NashLabError, ValueError):
    pass


class DegenerateFiber(NashLabError):
    pass


class DegenerateFiberWarning(UserWarning):
    pass


class NonTransversalProjection(NashLabError):
    pass


class InconsistentParity(NashLabError):
    pass


class BranchPairingAmbiguous(NashLabError):
    pass


class SingularPoint(NashLabError):
    pass


class NotOnVariety(NashLabError, ValueError):
    pass


class NotInjective(NashLabError):
    """The tangent limits over a point split into several subspaces."""

    def __init__(self, message, spaces=()):
        super().__init__(message)
        self.spaces = list(spaces)


class SingleBranch(NashLabError):
    pass


class InsufficientScales(NashLabError):
    pass


class ScaleTooLarge(NashLabError):
    pass


class DerivativeBoundViolated(NashLabError):
    pass


class DerivativeVanishes(NashLabError):
    pass


class DomainViolation(NashLabError, ValueError):
    pass
