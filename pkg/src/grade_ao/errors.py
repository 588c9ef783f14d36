"""Exception hierarchy for grade_ao.

The library raises; only the command-line layer maps these to exit codes.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .schema import GradeResult


class GradeAoError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GradeAoError, ValueError):
    """An input violated a documented precondition."""


class DimensionError(ValidationError):
    """Row/column counts or matrix shapes are out of range."""


class PatternError(ValidationError):
    """Coupling pattern is not strictly increasing from 0 to the memory."""


class DistributionError(ValidationError):
    """Edge distribution is not a probability vector of the right length."""


class LengthMismatch(ValidationError):
    """Two vectors that must align have different lengths."""


class ZeroScale(ValidationError):
    """Exponent substitution X -> X^0 requested."""


class BasisMismatch(ValidationError):
    """Multivariate polynomials over different cycle bases were combined."""


class BadStructure(ValidationError):
    """Cycle-8 structure id outside 1..6."""


class Infeasible(ValidationError):
    """No coupling pattern exists for the requested memory and pseudo-memory."""


class TooLarge(ValidationError):
    """Exhaustive enumeration requested over too many matrices."""


class NotACandidate(ValidationError):
    """Candidate does not satisfy the partition cycle condition."""


class MatrixParseError(GradeAoError):
    """Matrix or distribution file could not be parsed."""

    def __init__(self, reason: str, path: str = "<string>", line: int = 0, column: int = 0):
        self.reason = reason
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {reason}")


class NoConvergence(GradeAoError):
    """Gradient descent hit its iteration cap before meeting the tolerance."""

    def __init__(self, result: GradeResult):
        self.result = result
        super().__init__(
            f"no convergence after {result.iters} iterations "
            f"(objective {result.objective_final:.6g})"
        )


class InvariantViolation(GradeAoError):
    """One or more matrix invariants failed during verification."""

    def __init__(self, failures: list[str], report: dict[str, Any] | None = None):
        self.failures = list(failures)
        self.report = report or {}
        super().__init__("; ".join(self.failures))
