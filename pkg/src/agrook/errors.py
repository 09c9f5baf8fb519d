"""Exception types raised across the package."""


class AgRookError(Exception):
    pass


class NotPrime(AgRookError, ValueError):
    pass


class DivisionByZero(AgRookError, ZeroDivisionError):
    pass


class DegreeTooLarge(AgRookError, ValueError):
    pass


class NotSquareFree(AgRookError, ValueError):
    pass


class EvenDegreeUnsupported(AgRookError, ValueError):
    pass


class CharacteristicTwoHyperelliptic(AgRookError, ValueError):
    pass


class BadHermitianField(AgRookError, ValueError):
    pass


class UnsupportedPrimitive(AgRookError, ValueError):
    pass


class UnsupportedPlace(AgRookError, ValueError):
    pass


class IndeterminateForm(AgRookError, ArithmeticError):
    pass


class NotEnoughPlaces(AgRookError, ValueError):
    pass


class RookConditionViolated(AgRookError):
    pass


class ShapeMismatch(AgRookError, ValueError):
    pass


class RankMismatch(AgRookError, ValueError):
    pass


class InsufficientResponses(AgRookError):
    """Responding workers do not determine the requested outputs.

    ``rank`` is the rank of the responding rows, ``needed`` the rank the
    target functionals require on top of them.
    """

    def __init__(self, message, rank=None, needed=None):
        super().__init__(message)
        self.rank = rank
        self.needed = needed


class InconsistentResponses(AgRookError):
    pass


class SearchSpaceTooLarge(AgRookError, ValueError):
    pass
