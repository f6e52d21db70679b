"""Exception types raised across the package."""


class MdfmError(Exception):
    """Base class for all errors raised by :mod:`mdfm`."""


class InvalidInput(MdfmError, ValueError):
    pass


class ShapeMismatch(InvalidInput):
    pass


class LengthMismatch(InvalidInput):
    pass


class NotSymmetric(InvalidInput):
    pass


class NotPositiveDefinite(MdfmError, ArithmeticError):
    pass


class NoConvergence(MdfmError, ArithmeticError):
    pass


# --- dataset ingest ---------------------------------------------------------

class ParseError(MdfmError, ValueError):
    pass


class MissingField(ParseError):
    pass


class DuplicateViewName(ParseError):
    pass


class BadMagic(ParseError):
    pass


class DimMismatch(ParseError):
    pass


class SampleCountMismatch(ParseError):
    pass


class NonFiniteFeature(ParseError):
    pass


class IoError(MdfmError, OSError):
    pass


# --- transforms / episodes / self-training ----------------------------------

class DisconnectedGraph(MdfmError, ValueError):
    pass


class InsufficientClasses(InvalidInput):
    pass


class InsufficientSamples(InvalidInput):
    pass


class LabelOutOfRange(InvalidInput):
    pass


class EmptyPool(InvalidInput):
    pass


class IterationBudgetExceedsPool(InvalidInput):
    pass


class InvalidSpec(InvalidInput):
    pass
