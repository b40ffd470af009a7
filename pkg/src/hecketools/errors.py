"""Exception types shared across the package."""

from __future__ import annotations


class HeckeToolsError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(HeckeToolsError, ZeroDivisionError):
    pass


class ContextMismatch(HeckeToolsError, ValueError):
    pass


class SubstitutionPole(HeckeToolsError, ArithmeticError):
    pass


class EvalPole(HeckeToolsError, ArithmeticError):
    pass


class RankMismatch(HeckeToolsError, ValueError):
    pass


class BoundExceeded(HeckeToolsError, ValueError):
    pass


class OutOfRange(HeckeToolsError, ValueError):
    pass


class NonStandardGram(HeckeToolsError, ValueError):
    pass


class UnsupportedSpace(HeckeToolsError, ValueError):
    pass


class UnsupportedBasis(HeckeToolsError, ValueError):
    pass


class InvalidRoot(HeckeToolsError, ValueError):
    pass


class InvalidFamily(HeckeToolsError, ValueError):
    pass


class InvalidName(HeckeToolsError, ValueError):
    pass


class SumMismatch(HeckeToolsError, ValueError):
    pass


class UnknownFilter(HeckeToolsError, ValueError):
    pass


class UnknownFormula(HeckeToolsError, KeyError):
    pass


class IdentityFailed(HeckeToolsError, AssertionError):
    """An exact identity did not hold; ``detail`` carries the evidence."""

    def __init__(self, message: str, detail: object = None) -> None:
        super().__init__(message)
        self.detail = detail


class CheckFailed(IdentityFailed):
    pass


class CounterexampleFound(IdentityFailed):
    pass


class CharacterInconsistent(IdentityFailed):
    pass
