"""Exception hierarchy.

Input problems (malformed Hamiltonians, bad arguments) derive from
:class:`InputError`; failures of a numerical procedure derive from
:class:`NumericalError`.  The CLI maps the two families to exit codes 2 and 3.
"""


class CSPathError(Exception):
    """Base class for all package errors."""


class InputError(CSPathError, ValueError):
    pass


class ShapeError(InputError):
    """A symbol does not have the polynomial shape an operation requires."""


class DegenerateError(InputError):
    """A parameter value at which a representation does not exist (e.g. b2 = 0)."""


class NumericalError(CSPathError, ArithmeticError):
    pass


class DivergenceError(NumericalError):
    """A Boltzmann sum whose terms do not decay."""


class TruncationError(NumericalError):
    """A truncated sum whose first omitted term exceeds the requested tolerance."""


class QuadratureError(NumericalError):
    """Quadrature order escalation or refinement failed to converge."""


class ContourError(NumericalError):
    """The integrand does not decay at the ends of the chosen contour."""


class SaddleError(NumericalError):
    """Newton iteration for a stationary point failed."""

    def __init__(self, message, trajectory=()):
        super().__init__(message)
        self.trajectory = list(trajectory)
