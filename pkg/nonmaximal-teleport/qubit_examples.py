"""
Qubit (n = 2) constructions: the spin basis, bases induced by real
orthogonal transformations of the spin coordinates, the three-angle rotation
family and the two-angle diagonal/anti-diagonal bases.
"""
import logging
from typing import List, Tuple, Union

import numpy as np
from pydantic import ValidationError

from exceptions import NonOrthogonalMatrixError
from models import ElementProfile, OperatorBasis, OrthogonalMatrix4, RotationAngles
from resource_state import entanglement_entropy, is_maximally_entangled

logger = logging.getLogger(__name__)

# |det f_a| above this counts as rank 2
RANK_TWO_THRESHOLD = 1e-10


def spin_matrices() -> np.ndarray:
    """S_0 = I, S_1, S_2, S_3 (unnormalized)."""
    return np.array([
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ], dtype=complex)


def spin_basis() -> OperatorBasis:
    """omega_a = S_a / sqrt(2)."""
    return OperatorBasis(elements=spin_matrices() / np.sqrt(2))


def plane_rotation(a: int, b: int, theta: float) -> np.ndarray:
    """Rotation of R^4 by theta in the (a, b) coordinate plane: [[c, -s], [s, c]]."""
    R = np.eye(4)
    c, s = np.cos(theta), np.sin(theta)
    R[a, a], R[a, b], R[b, a], R[b, b] = c, -s, s, c
    return R


def rotation_C(angles: RotationAngles) -> OrthogonalMatrix4:
    """C = R01(theta1) R02(theta2) R03(theta3), written out entry by entry."""
    c1, c2, c3 = np.cos([angles.theta1, angles.theta2, angles.theta3])
    s1, s2, s3 = np.sin([angles.theta1, angles.theta2, angles.theta3])
    return OrthogonalMatrix4(entries=[
        [c1 * c2 * c3, -s1, -c1 * s2, -c1 * c2 * s3],
        [s1 * c2 * c3, c1, -s1 * s2, -s1 * c2 * s3],
        [s2 * c3, 0.0, c2, -s2 * s3],
        [s3, 0.0, 0.0, c3],
    ])


def _as_orthogonal(C: Union[OrthogonalMatrix4, np.ndarray]) -> np.ndarray:
    if isinstance(C, OrthogonalMatrix4):
        return C.entries
    try:
        return OrthogonalMatrix4(entries=C).entries
    except ValidationError as e:
        raise NonOrthogonalMatrixError(str(e)) from e


def basis_from_orthogonal(C: Union[OrthogonalMatrix4, np.ndarray], omega: OperatorBasis = None) -> OperatorBasis:
    """f_a = sum_b C_ab omega_b; Hermitian when omega is the spin basis."""
    C = _as_orthogonal(C)
    omega = spin_basis() if omega is None else omega
    return OperatorBasis(elements=np.einsum("ab,bpq->apq", C, omega.elements))


def det_formula_check(C: Union[OrthogonalMatrix4, np.ndarray]) -> List[Tuple[float, float]]:
    """Per a: (det f_a computed directly, (C_a0^2 - sum_{b>=1} C_ab^2) / 2)."""
    C = _as_orthogonal(C)
    f = basis_from_orthogonal(C).elements
    direct = np.linalg.det(f).real
    formula = 0.5 * (C[:, 0] ** 2 - np.sum(C[:, 1:] ** 2, axis=1))
    return [(float(d), float(e)) for d, e in zip(direct, formula)]


def rank_two_flags(C: Union[OrthogonalMatrix4, np.ndarray]) -> List[bool]:
    return [abs(direct) > RANK_TWO_THRESHOLD for direct, _ in det_formula_check(C)]


def orthogonality_sums(C: Union[OrthogonalMatrix4, np.ndarray]) -> Tuple[List[float], float]:
    """Row sums C_a0^2 + sum_b C_ab^2 and the column sum sum_a C_a0^2 (all equal 1)."""
    C = _as_orthogonal(C)
    return [float(x) for x in np.sum(C ** 2, axis=1)], float(np.sum(C[:, 0] ** 2))


def unitary_equivalent_to_spin(C: Union[OrthogonalMatrix4, np.ndarray], tol: float = 1e-12) -> bool:
    """
    Whether some unitary U gives U omega_a U* = f_a for every a.

    Conjugation fixes omega_0 and acts on the Pauli coordinates as a proper
    rotation, so C_00 must be 1 and the lower 3x3 block must have det +1.
    """
    C = _as_orthogonal(C)
    return bool(abs(C[0, 0] - 1.0) <= tol and np.linalg.det(C[1:, 1:]) > 0)


def simple_theta_basis(theta1: float, theta2: float) -> OperatorBasis:
    """Diagonal pair in theta1, anti-diagonal pair in theta2; rank 2 for 0 < theta < pi/2."""
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    return OperatorBasis(elements=[
        [[c1, 0], [0, s1]],
        [[-s1, 0], [0, c1]],
        [[0, c2], [s2, 0]],
        [[0, -s2], [c2, 0]],
    ])


def entanglement_profile(angles: RotationAngles) -> List[ElementProfile]:
    """
    Per-element diagnostics of the rotation-induced basis.

    Maximality is always decided by f* f = f f* = I/2; the |sin theta3| > 1/2
    inequality is reported next to it so disagreements are visible.
    """
    C = rotation_C(angles)
    f = basis_from_orthogonal(C).elements
    predicts = abs(np.sin(angles.theta3)) > 0.5
    profile = []
    for alpha, ((det, _), fa) in enumerate(zip(det_formula_check(C), f)):
        profile.append(ElementProfile(
            alpha=alpha,
            determinant=det,
            full_rank=abs(det) > RANK_TWO_THRESHOLD,
            maximally_entangled=is_maximally_entangled(fa),
            entropy_bits=entanglement_entropy(fa),
            inequality_predicts_nonmaximal=bool(predicts),
        ))
    disagreements = [p.alpha for p in profile if p.inequality_predicts_nonmaximal == p.maximally_entangled]
    if disagreements:
        logger.debug(f"maximality verdict differs from the |s3| > 1/2 inequality for alpha in {disagreements}")
    return profile
