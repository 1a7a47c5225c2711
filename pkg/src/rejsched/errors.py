"""Exception hierarchy shared by every solver module."""


class RejschedError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RejschedError, ValueError):
    """Malformed instance, solution or LP text.

    ``position`` is either a character offset into the input or a field path
    such as ``jobs[3].p``.
    """

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class MissingField(ParseError):
    pass


class NegativeValue(ParseError):
    pass


class MissingMachines(ParseError):
    pass


class SolutionError(RejschedError, ValueError):
    pass


class MismatchedLength(SolutionError):
    pass


class BadMachineIndex(SolutionError):
    pass


class NonPositiveScale(RejschedError, ValueError):
    pass


class InvalidGuess(RejschedError, ValueError):
    pass


class EpsilonOutOfRange(RejschedError, ValueError):
    pass


class InfeasibleBudget(RejschedError):
    pass


class ZeroCost(RejschedError):
    """Approx1 already reached cost 0, so no rescaling is possible.

    Carries the zero-cost ``(solution, report)`` pair in ``result``.
    """

    def __init__(self, result):
        self.result = result
        super().__init__("Approx1 objective is 0; solution is already optimal")


class CapExceeded(RejschedError):
    """An enumeration produced more items than its cap allows.

    When raised out of ``eptas.run`` the ``partial`` attribute holds the best
    ``(solution, report, diagnostics)`` found before the cap was hit. That
    result carries no approximation guarantee.
    """

    def __init__(self, what, cap, partial=None):
        self.what = what
        self.cap = cap
        self.partial = partial
        super().__init__(f"{what} exceeded cap of {cap}")


class RoundingOverflow(RejschedError):
    pass


class InvariantViolation(AssertionError):
    """A proven structural property (vertex sparsity, rounding bounds) failed."""


class TooLarge(RejschedError):
    pass


class OracleTimeout(RejschedError):
    pass


class BadConfig(RejschedError, ValueError):
    pass
