# src/holder_lab/core/errors.py
from __future__ import annotations

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_UNEXPECTED = 4


class HolderLabError(Exception):
    """Base application exception."""

    pass


class InvalidParameter(HolderLabError):
    pass


class DegeneratePair(InvalidParameter):
    """slope() called with x == y."""


class UnknownExperiment(HolderLabError):
    pass


class BudgetExhausted(HolderLabError):
    pass


class RootIsolationError(HolderLabError):
    pass


class InsufficientDepth(HolderLabError):
    def __init__(self, message: str, needed_depth: int) -> None:
        super().__init__(f"{message} (needs depth >= {needed_depth})")
        self.needed_depth = needed_depth


def to_exit_code(exc: BaseException | None) -> int:
    """
    Convert our exceptions to CLI exit statuses. None means "ran, passed".
    """
    if exc is None:
        return EXIT_PASS
    if isinstance(exc, InvalidParameter | UnknownExperiment):
        return EXIT_INVALID
    if isinstance(exc, BudgetExhausted | RootIsolationError | InsufficientDepth):
        return EXIT_BUDGET
    if isinstance(exc, HolderLabError):
        return EXIT_INVALID
    # Fallback
    return EXIT_UNEXPECTED
