"""
Entangled resource states on H2 (x) H3, the rank-one projector families
P_a / Q_a, and pure-state entanglement diagnostics.
"""
import logging
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from channels import apply_cp
from config import Config
from exceptions import MalformedStateError, UnnormalizedOperatorError
from models import BipartiteState, OperatorBasis, OperatorMatrix, ProjectorFamily, Resource, SuperOperator
from operator_space import map_images, partial_trace, require_orthonormal, superop_right, vec_left, vec_right

logger = logging.getLogger(__name__)


def _normalized(f: OperatorMatrix) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    norm = float(np.vdot(f, f).real)
    if abs(norm - 1.0) > Config.STRUCTURAL_TOLERANCE:
        raise UnnormalizedOperatorError(f"operator is not normalized: tr(f*f) = {norm:.12g}")
    return f


def projector_Q(f: OperatorMatrix) -> SuperOperator:
    """Q = sum_ij e_ij (x) f e_ij f* = |f^R>><<f^R|."""
    v = vec_right(_normalized(f))
    return np.outer(v, v.conj())


def projector_P(f: OperatorMatrix) -> SuperOperator:
    """P = sum_ij f e_ij f* (x) e_ij = |f^L>><<f^L|."""
    v = vec_left(_normalized(f))
    return np.outer(v, v.conj())


def projector_family(b: OperatorBasis, side: Literal["left", "right"] = "right") -> ProjectorFamily:
    """The n^2 projectors P_a (side="left") or Q_a (side="right") of an orthonormal basis."""
    require_orthonormal(b)
    build = {"left": projector_P, "right": projector_Q}[side]
    return ProjectorFamily(dim=b.dim, projectors=np.array([build(f) for f in b.elements]))


def sigma_from_cp(t: Resource) -> BipartiteState:
    """
    Choi-type state sigma = sum_ij e_ij (x) Theta(e_ij).

    Equals sum_a lambda_a Q_a, so its spectrum is {lambda_a}.
    """
    matrix = superop_right(map_images(lambda e: apply_cp(t, e), t.dim))
    try:
        return BipartiteState(dim=t.dim, matrix=matrix)
    except ValidationError as e:
        raise MalformedStateError(f"resource state is malformed: {e}") from e


def choi_spectrum(t: Resource) -> List[float]:
    """Eigenvalues of sigma_from_cp(t), descending."""
    values = np.linalg.eigvalsh(sigma_from_cp(t).matrix)
    return [float(x) for x in values[::-1]]


def marginals(state: BipartiteState) -> Tuple[np.ndarray, np.ndarray]:
    """(trace over first factor, trace over second factor)."""
    n = state.dim
    return (
        partial_trace(state.matrix, [n, n], keep=[1]),
        partial_trace(state.matrix, [n, n], keep=[0]),
    )


def schmidt_values(f: OperatorMatrix) -> List[float]:
    """Singular values of f in descending order; the Schmidt coefficients of f^L and f^R."""
    return [float(s) for s in np.linalg.svd(np.asarray(f, dtype=complex), compute_uv=False)]


def entanglement_entropy(f: OperatorMatrix) -> float:
    """Entropy of the Schmidt spectrum in bits, with 0 log 0 = 0."""
    p = np.square(schmidt_values(f))
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def is_maximally_entangled(f: OperatorMatrix, tol: Optional[float] = None) -> bool:
    """f* f = f f* = I/n within tol (max-entry norm), i.e. f = U/sqrt(n)."""
    tol = Config.STRUCTURAL_TOLERANCE if tol is None else tol
    f = np.asarray(f, dtype=complex)
    target = np.eye(f.shape[0]) / f.shape[0]
    left = float(np.max(np.abs(f.conj().T @ f - target)))
    right = float(np.max(np.abs(f @ f.conj().T - target)))
    return left <= tol and right <= tol
