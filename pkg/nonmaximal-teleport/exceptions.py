"""
Exception types raised by the teleportation library.
"""
from typing import Optional


class TeleportError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(TeleportError, ValueError):
    """Dimension n is not a positive integer."""


class DimensionMismatchError(TeleportError, ValueError):
    """Operands live in spaces of different dimension."""


class MalformedBasisError(TeleportError, ValueError):
    """Operator family has the wrong number or shape of elements."""


class NonOrthonormalBasisError(MalformedBasisError):
    """Operator family is not orthonormal under the Hilbert-Schmidt product."""


class NonHermitianError(TeleportError, ValueError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotPositiveSemidefiniteError(TeleportError, ValueError):
    """Matrix has a negative eigenvalue below the roundoff floor."""


class NotNormalizableError(TeleportError, ArithmeticError):
    """
    Positive operator is rank deficient, so its inverse square root
    does not exist. Carries the offending eigenvalue.
    """

    def __init__(self, message: str, eigenvalue: float, max_eigenvalue: Optional[float] = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.max_eigenvalue = max_eigenvalue


class UnnormalizedOperatorError(TeleportError, ValueError):
    """Operator f does not satisfy tr(f* f) = 1."""


class MalformedStateError(TeleportError, ValueError):
    """Density matrix fails Hermiticity, positivity or unit trace."""


class OutcomeIndexError(TeleportError, IndexError):
    """Measurement outcome index out of range."""


class DimensionOverflowError(TeleportError, ValueError):
    """Dimension too large for the dense tripartite construction."""


class NonUnitaryError(TeleportError, ValueError):
    """Key operator is not unitary within tolerance."""


class ZeroProbabilityError(TeleportError, ArithmeticError):
    """Outcome has vanishing probability; no conditional state exists."""


class NumericalDegeneracyError(TeleportError, ArithmeticError):
    """Random draw stayed numerically dependent after all retries."""


class NonOrthogonalMatrixError(TeleportError, ValueError):
    """Real 4x4 matrix is not orthogonal."""


class MissingKeyError(TeleportError, TypeError):
    """Unitary keys only exist for pure resources."""


class ConfigError(TeleportError, ValueError):
    """Experiment document could not be parsed or validated."""
