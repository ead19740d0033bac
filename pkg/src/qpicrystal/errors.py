class QpiError(Exception):
    """Base class for package errors."""


class DivisionByZeroDivisor(QpiError, ZeroDivisionError):
    pass


class NotRegularAtZero(QpiError, ValueError):
    pass


class ParseError(QpiError, ValueError):
    pass


class InvalidDatum(QpiError, ValueError):
    pass


class CutoffExceeded(QpiError):
    pass


class DimensionBudgetExceeded(QpiError):
    pass


class NonDominantWeight(QpiError, ValueError):
    pass


class ModuleMismatch(QpiError, ValueError):
    pass


class NonTerminating(QpiError):
    pass


class VerificationFailure(QpiError):
    pass
