"""Exception types shared across the package."""


class HelixDipolesError(Exception):
    """Base class for all package errors."""


class GeometryError(HelixDipolesError):
    """Helix parameters outside the physically admissible range."""


class CoincidenceError(HelixDipolesError):
    """Interaction requested at (numerically) coincident particle positions."""


class GridError(HelixDipolesError):
    """Discretization grid unfit for the requested computation."""


class DimensionError(HelixDipolesError):
    """Operator/vector shape mismatch."""


class ConvergenceError(HelixDipolesError):
    """Iterative eigensolver hit its iteration cap before reaching tolerance.

    Carries the best result obtained so far on the ``result`` attribute.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
