"""Exception hierarchy shared by the solvers and the command-line front end."""

from __future__ import annotations


class ScatteringError(Exception):
    """Base class. ``parameters`` carries the offending inputs for error reports."""

    def __init__(self, message: str, **parameters):
        super().__init__(message)
        self.message = message
        self.parameters = parameters

    @property
    def kind(self) -> str:
        return type(self).__name__


class InvalidPotential(ScatteringError, ValueError):
    def __init__(self, problems, **parameters):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems), **parameters)


class InvalidWave(ScatteringError, ValueError):
    pass


class NonFinite(ScatteringError, ValueError):
    pass


class SingularMatrix(ScatteringError, ArithmeticError):
    pass


class SpectralSingularity(ScatteringError):
    """The solver matrix is singular at real (k, theta0): a zero-width resonance."""


class GrazingMode(ScatteringError):
    pass


class IncommensurateFrequencies(ScatteringError):
    pass


class OutOfCell(ScatteringError):
    pass


class OutOfRegime(ScatteringError):
    pass


class DegenerateLine(ScatteringError, ValueError):
    pass


class GrazingAfterRotation(ScatteringError):
    pass


class DegenerateSeparation(ScatteringError, ValueError):
    pass


class NotConverged(ScatteringError):
    def __init__(self, message: str, estimated_ratio: float, **parameters):
        super().__init__(message, estimated_ratio=estimated_ratio, **parameters)
        self.estimated_ratio = estimated_ratio
