"""Exception hierarchy shared by every module."""


class CRPointsError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(CRPointsError, ValueError):
    """Shapes do not fit together (non-square input, mismatched sizes, n = 0)."""


class PreconditionError(CRPointsError, ValueError):
    """Input is well-formed but violates an operation's precondition."""


class InvalidGroupElementError(PreconditionError):
    pass


class IllPosedCountError(PreconditionError):
    pass


class NumericError(CRPointsError, ArithmeticError):
    """A numerical procedure failed; ``residual`` carries the offending size when known."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GenericityError(NumericError):
    pass


class InternalConsistencyError(NumericError):
    pass


class SamplingError(NumericError):
    pass


class PathConstructionError(NumericError):
    pass


class CertificationError(NumericError):
    """A homotopy segment failed its sampled nondegeneracy check."""

    def __init__(self, message, segment=None, worst_t=None, residual=None):
        super().__init__(message, residual=residual)
        self.segment = segment
        self.worst_t = worst_t
