"""Failure modes shared across the package.

Every exception that encodes a mathematical obstruction (as opposed to bad
input) derives from :class:`MathematicalObstruction` and may carry a
``certificate`` dict with the numbers that witnessed the failure, so callers
(and the CLI) can report them without re-deriving anything.
"""

from __future__ import annotations


class QWienerError(Exception):
    """Base class for everything raised deliberately by this package."""

    def __init__(self, message: str, certificate: dict | None = None):
        super().__init__(message)
        self.certificate = certificate or {}


class MathematicalObstruction(QWienerError):
    """The input is well formed but the requested object does not exist."""


class DimensionMismatch(QWienerError):
    pass


class NotScalar(QWienerError):
    pass


class SymmetryViolation(QWienerError):
    """A complex matrix failed the quaternionic-image symmetry test."""


class SingularPoint(QWienerError):
    """Evaluation requested at a point where the series is undefined."""


class GridTooCoarse(QWienerError):
    """Argument tracking stayed inconsistent up to the grid cap."""


class NotInvertible(MathematicalObstruction):
    pass


class NotInvertibleOnCircle(MathematicalObstruction):
    pass


class TailTooHeavy(MathematicalObstruction):
    """Truncated inverse coefficients kept too much mass outside the window."""


class OutOfScope(QWienerError):
    """The requested computation falls outside the supported input class."""


class DegreeCapExceeded(QWienerError):
    """The barrier-solution degree ladder topped out before completion."""


class InternalInvariantViolation(QWienerError):
    """An invariant the algorithms rely on failed numerically; a bug or a
    catastrophically conditioned input."""


class ResidualTooLarge(MathematicalObstruction):
    pass


class PoleOnBoundary(MathematicalObstruction):
    pass


class ImproperInput(QWienerError):
    pass


class SingularPencil(MathematicalObstruction):
    pass


class PoleOnCircle(MathematicalObstruction):
    pass


class SymmetryResidualTooLarge(QWienerError):
    pass


class ObstructionConditionI(MathematicalObstruction):
    """The associated pencil hits the boundary sphere: no canonical factorization."""


class ObstructionConditionII(MathematicalObstruction):
    """A direct-sum condition fails; ``certificate['defect']`` holds the
    smallest singular value of the stacked bases."""


class SymbolNotInvertible(MathematicalObstruction):
    pass


class SymbolNotRational(QWienerError):
    pass


class TruncationBudgetExceeded(QWienerError):
    pass
