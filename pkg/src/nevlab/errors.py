"""Exception hierarchy shared by all nevlab modules."""

from __future__ import annotations


class NevlabError(Exception):
    """Base class for every error raised by the library."""


class ParseError(NevlabError, ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class NonRepresentableScalar(ParseError):
    """A literal (e.g. ``sqrt(2)``) has no exact Gaussian-rational value."""


class DomainMismatch(NevlabError, TypeError):
    """Exact and float exponential polynomials were mixed in one operation."""


class ZeroOnContour(NevlabError):
    """The integration contour passes through (or too near) a zero."""


class NonConvergent(NevlabError):
    """An adaptive routine hit its refinement cap."""


class ClusterUnresolved(NevlabError):
    """A box at the subdivision floor still holds more than one zero."""


class ResourceLimit(NevlabError):
    """A combinatorial construction exceeded its size cap."""


class PreconditionError(NevlabError, ValueError):
    """Inputs violate a documented precondition of an analysis."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class DegenerateCurve(PreconditionError):
    """The curve is linearly degenerate (zero Wronskian) or lies in a hyperplane."""


class EpsWindowEmpty(PreconditionError):
    """No admissible epsilon exists for the chosen bound parameters."""
