"""Exception types shared across the package."""


class NormalizationError(ValueError):
    """A supposed unit vector is not of norm one."""

    def __init__(self, index, norm):
        super().__init__(f"row {index} has norm {norm!r}, expected 1")
        self.index = index
        self.norm = norm


class PreconditionError(ValueError):
    """Input violates the mathematical precondition of an operation."""


class UnsupportedInputError(ValueError):
    """Input is valid but this route cannot handle it (e.g. singular H)."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""


class CertificationError(RuntimeError):
    """The pipeline failed to certify the zone bound.

    The theorem guarantees a certificate, so this signals a solver defect.
    """

    def __init__(self, message, best_margin=None):
        super().__init__(message)
        self.best_margin = best_margin
