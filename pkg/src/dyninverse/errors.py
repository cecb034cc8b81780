"""Exception types shared by every module, plus the ``FAIL`` sentinel."""
from __future__ import annotations


class DynInverseError(Exception):
    pass


class ZeroInverse(DynInverseError, ZeroDivisionError):
    pass


class NonUnit(DynInverseError, ZeroDivisionError):
    pass


class DimensionMismatch(DynInverseError, ValueError):
    pass


class Singular(DynInverseError):
    """The matrix (or a pivot block) is not invertible.

    ``stage`` names the step that failed when an operation has several,
    e.g. ``"column"`` or ``"row"`` for a combined row/column update.
    """

    def __init__(self, message: str = "matrix is singular", stage: str | None = None):
        super().__init__(message)
        self.stage = stage


class PreconditionViolated(DynInverseError, ValueError):
    pass


class NotUnipotent(DynInverseError, ValueError):
    pass


class ScheduleViolation(DynInverseError):
    pass


class Unreachable(DynInverseError):
    pass


class UnsupportedUpdate(DynInverseError, TypeError):
    """A reducer was handed an update granularity it does not model."""


class _Fail:
    """Returned (not raised) by queries that cannot be answered."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Fail"

    __str__ = __repr__

    def __bool__(self) -> bool:
        return False


FAIL = _Fail()
