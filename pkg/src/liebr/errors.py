"""Exception types shared across the package."""


class LiebrError(Exception):
    """Base class for all liebr errors."""


class DimensionMismatchError(LiebrError):
    """Phase points, structures or observables of incompatible dimension."""


class DegenerateStructureError(LiebrError):
    """Bracket tensor is singular where an inverse was requested."""


class SingularJacobianError(LiebrError):
    """Coordinate map has a non-invertible Jacobian at the requested point."""


class CausticError(LiebrError):
    """Evaluation at or beyond a focal (caustic) time.

    Carries ``nearest_caustic``, the closest singular time/proper-time, and
    optionally ``eigenvalue``, the offending generator eigenvalue.
    """

    def __init__(self, message, nearest_caustic=None, eigenvalue=None):
        super().__init__(message)
        self.nearest_caustic = nearest_caustic
        self.eigenvalue = eigenvalue


class CoincidenceLimitError(LiebrError):
    """Kernel requested at zero elapsed time, where it is a delta function."""


class BlowUpError(LiebrError):
    """Integration produced a non-finite state.  Carries ``step`` and ``time``."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class ConfigError(LiebrError):
    """Invalid run configuration (unknown keys, bad types, missing fields)."""
