"""Exception hierarchy shared by all modules."""


class EvidenceError(Exception):
    """Base class for every error raised by this package."""


class NonConvergence(EvidenceError):
    """Adaptive quadrature did not reach its tolerance within the subdivision budget."""


class NonPositiveDenominator(EvidenceError):
    """V - b <= 0, so the Van der Waals form cannot be evaluated."""


class InvalidClass(EvidenceError):
    """An operation was asked for a hypothesis-contrast class it does not support."""


class DegenerateMinimum(EvidenceError):
    """The transition-point scan did not find the expected interior minima."""

    def __init__(self, message, found=()):
        super().__init__(message)
        self.found = tuple(found)


class NotBracketable(EvidenceError):
    """The iso-E target cannot be bracketed in the sample-size search range."""


class OutOfRange(EvidenceError):
    """Input outside the domain where an oracle is exact."""
