"""
Completely positive maps in canonical form, their duals, and the
positive-semidefinite (inverse) square roots used for normalization.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from config import Config
from exceptions import DimensionMismatchError, NonHermitianError, NotNormalizableError, NotPositiveSemidefiniteError
from models import CpMapSpec, OperatorMatrix, PureResource, Resource
from operator_space import complete_basis

logger = logging.getLogger(__name__)


def kraus_terms(t: Resource) -> Tuple[np.ndarray, np.ndarray]:
    """(weights, operators) such that Theta(A) = sum_k w_k K_k A K_k*."""
    if isinstance(t, PureResource):
        return np.ones(1), t.f[np.newaxis]
    return t.weights, t.basis.elements


def _operand(t: Resource, A: OperatorMatrix) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.shape != (t.dim, t.dim):
        raise DimensionMismatchError(f"operator of shape {A.shape} does not match map on M_{t.dim}")
    return A


def apply_cp(t: Resource, A: OperatorMatrix) -> OperatorMatrix:
    """Theta(A) = sum_a lambda_a f_a A f_a*."""
    A = _operand(t, A)
    w, K = kraus_terms(t)
    return np.einsum("a,apq,qr,asr->ps", w, K, A, K.conj())


def dual_cp(t: Resource, A: OperatorMatrix) -> OperatorMatrix:
    """Dual map: sum_a lambda_a f_a* A f_a, so that tr(A Theta(rho)) = tr(dual(A) rho)."""
    A = _operand(t, A)
    w, K = kraus_terms(t)
    return np.einsum("a,aqp,qr,ars->ps", w, K.conj(), A, K)


def trace_weight(t: Resource) -> OperatorMatrix:
    """Dual map at the identity; tr(Theta(rho)) = tr(trace_weight(t) rho)."""
    return dual_cp(t, np.eye(t.dim))


def pure_as_cp(resource: PureResource) -> CpMapSpec:
    """Write f . f* in canonical form: lambda = (1, 0, ..., 0) over a basis starting at f."""
    n = resource.dim
    weights = np.zeros(n * n)
    weights[0] = 1.0
    return CpMapSpec(weights=weights, basis=complete_basis(resource.f))


def _psd_spectrum(K: OperatorMatrix, rel_cutoff: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    K = np.asarray(K, dtype=complex)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {K.shape}")
    rel_cutoff = Config.RANK_CUTOFF if rel_cutoff is None else rel_cutoff
    herm = float(np.max(np.abs(K - K.conj().T)))
    if herm > Config.STRUCTURAL_TOLERANCE:
        raise NonHermitianError(f"matrix is not Hermitian (defect {herm:.3g})")
    values, V = np.linalg.eigh((K + K.conj().T) / 2)
    if values[0] < -Config.NEGATIVE_FLOOR:
        raise NotPositiveSemidefiniteError(f"matrix has negative eigenvalue {values[0]:.6g}")
    values = np.clip(values, 0.0, None)
    top = values[-1]
    if top <= 0 or values[0] < rel_cutoff * top:
        raise NotNormalizableError(
            f"rank deficient: eigenvalue {values[0]:.6g} below {rel_cutoff:.1e} x max eigenvalue {top:.6g}",
            eigenvalue=float(values[0]),
            max_eigenvalue=float(top),
        )
    return values, V


def psd_inv_sqrt(K: OperatorMatrix, rel_cutoff: Optional[float] = None) -> OperatorMatrix:
    """
    K^{-1/2} by Hermitian eigendecomposition.

    Raises:
        NotNormalizableError: if the smallest eigenvalue is below rel_cutoff times
            the largest (K is not of full rank)
    """
    values, V = _psd_spectrum(K, rel_cutoff)
    return (V * values ** -0.5) @ V.conj().T


def psd_sqrt(K: OperatorMatrix, rel_cutoff: Optional[float] = None) -> OperatorMatrix:
    """K^{1/2}, under the same full-rank requirement as psd_inv_sqrt."""
    values, V = _psd_spectrum(K, rel_cutoff)
    return (V * np.sqrt(values)) @ V.conj().T
