"""Shared exception types."""


class SheafkitError(Exception):
    """Base class for all library errors."""


# -- finite spaces -----------------------------------------------------------

class SpaceError(SheafkitError):
    pass


class PointMissingFromOwnNeighborhood(SpaceError):
    pass


class MinOpenNotOpen(SpaceError):
    pass


class NotT0(SpaceError):
    pass


class SpaceTooLarge(SpaceError):
    pass


# -- finite rings ------------------------------------------------------------

class RingError(SheafkitError):
    pass


class NotPrime(RingError):
    pass


class InvalidPolynomial(RingError):
    pass


class NotAField(RingError):
    pass


class NonSquare(RingError):
    pass


class InvalidMorphism(RingError):
    pass


# -- searches / budgets ------------------------------------------------------

class SearchBudgetExceeded(SheafkitError):
    pass


# -- sheaf constructions -----------------------------------------------------

class CocycleConditionViolated(SheafkitError):
    pass


class InvalidWeights(SheafkitError):
    pass


class TrivializationMismatch(SheafkitError):
    pass


class NotLocallyFree(SheafkitError):
    pass


# -- CLI ---------------------------------------------------------------------

class ParseError(SheafkitError):
    pass


class ValidationError(SheafkitError):
    pass
