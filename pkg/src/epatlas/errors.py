"""Exception hierarchy.

Every error carries a short machine-readable ``reason`` used by the CLI.
"""


class EpAtlasError(Exception):
    reason = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    @property
    def message(self):
        return self.args[0] if self.args else self.reason


class DimensionError(EpAtlasError, ValueError):
    reason = "dimension mismatch"


class DomainError(EpAtlasError, ValueError):
    reason = "parameter outside model domain"


class IterationError(EpAtlasError, ArithmeticError):
    """Root iteration did not converge; ``best`` holds the last iterate."""

    reason = "iteration failure"

    def __init__(self, message, best=None, residual=None):
        super().__init__(message, best=best, residual=residual)
        self.best = best
        self.residual = residual


class NotAnEigenvalueError(EpAtlasError, ValueError):
    reason = "not an eigenvalue"


class SpecMismatchError(EpAtlasError, ValueError):
    reason = "jordan structure mismatch"


class DegenerateChainError(EpAtlasError, ArithmeticError):
    reason = "no invertible transition matrix found"


class EPObstructionError(EpAtlasError, ValueError):
    reason = "EP obstruction: non-diagonalizable input"


class BrokenRealityError(EpAtlasError, ValueError):
    reason = "broken reality: complex eigenvalues"


class FactorizationError(EpAtlasError, ArithmeticError):
    reason = "matrix not positive definite"

    def __init__(self, message, minor=None):
        super().__init__(message, minor=minor)
        self.minor = minor


class SingularMatrixError(EpAtlasError, ArithmeticError):
    reason = "singular matrix"


class NotFoundError(EpAtlasError, ArithmeticError):
    reason = "no exceptional point in bracket"

    def __init__(self, message, achieved=None):
        super().__init__(message, achieved=achieved)
        self.achieved = achieved


class NoiseFloorError(EpAtlasError, ArithmeticError):
    reason = "distances below noise floor"


class ParseError(EpAtlasError, ValueError):
    reason = "parse error"
