"""Exception hierarchy shared by every module."""


class BellCheckError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(BellCheckError, ValueError):
    """Mismatched scenarios or malformed array shapes."""


class InvalidPhenomenon(BellCheckError, ValueError):
    pass


class InvalidTheory(BellCheckError, ValueError):
    pass


class UnsupportedOutcomeMap(BellCheckError, ValueError):
    """An operation needs +1/-1 outcome values but the scenario has another map."""


class ScenarioTooLarge(BellCheckError):
    pass


class NumericallyAmbiguous(BellCheckError):
    """Float LP result is within tolerance of the feasibility boundary.

    Retry with the rational encoding to get an exact answer.
    """

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class NotFactorizable(BellCheckError):
    pass


class InternalInconsistency(BellCheckError, AssertionError):
    """Property checkers disagree with each other; always a bug in a checker."""


class PreconditionsNotMet(BellCheckError):
    pass


class DecompositionMismatch(BellCheckError, ValueError):
    pass


class InvalidState(BellCheckError, ValueError):
    pass
