"""Exception hierarchy shared by all modules; the CLI maps these to exit codes."""


class VigcellError(Exception):
    """Base class for all package errors."""


class ValidationError(VigcellError):
    """Invalid input data (geometry file, moduli, configuration)."""


class SolverError(VigcellError):
    """The linear solver failed (non-convergence or unexpected singularity)."""


class SymmetryError(VigcellError):
    """Effective tensor fails the square-symmetry tolerance."""

    def __init__(self, residual, tolerance):
        super().__init__(
            f"square-symmetry residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
        )
        self.residual = residual
        self.tolerance = tolerance


class NotApplicableError(VigcellError):
    """A line-based quantity is undefined for this geometry (no transversal lines)."""
