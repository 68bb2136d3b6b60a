"""
The Hilbert-Schmidt space M_n.

Kronecker convention used throughout the package: in X (x) Y the first factor
is the slow index, so e_i (x) e_j sits at position i*n + j (0-based). Matrix
units are ordered row-major: e_11, e_12, ..., e_nn.
"""
import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from exceptions import (
    DimensionMismatchError,
    InvalidDimensionError,
    MalformedBasisError,
    NonHermitianError,
    NonOrthonormalBasisError,
    NumericalDegeneracyError,
)
from models import CoefficientMatrix, HsVector, OperatorBasis, OperatorMatrix, SuperOperator

logger = logging.getLogger(__name__)


def _square(A: np.ndarray, name: str = "operator") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {A.shape}")
    return A


def _same_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatchError(f"operands have mismatched dimensions {sorted(dims)}")
    return dims.pop()


def _isqrt_exact(m: int, what: str) -> int:
    n = int(round(np.sqrt(m)))
    if n * n != m or n == 0:
        raise DimensionMismatchError(f"{what} length {m} is not a positive perfect square")
    return n


def matrix_units(n: int) -> OperatorBasis:
    """The n^2 matrix units e_ij, row-major."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    return OperatorBasis(elements=np.eye(n * n, dtype=complex).reshape(n * n, n, n))


def hs_inner(A: OperatorMatrix, B: OperatorMatrix) -> complex:
    """(A, B) = tr(A* B); conjugate-linear in A."""
    A, B = _square(A), _square(B)
    _same_dim(A, B)
    return complex(np.vdot(A, B))


def vec_left(A: OperatorMatrix) -> HsVector:
    """A^L = sum_i A e_i (x) e_i, i.e. the row-major flattening of A."""
    return _square(A).reshape(-1).copy()


def vec_right(A: OperatorMatrix) -> HsVector:
    """A^R = sum_i e_i (x) A e_i, i.e. the row-major flattening of A^T."""
    return _square(A).T.reshape(-1).copy()


def devec_left(v: HsVector) -> OperatorMatrix:
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = _isqrt_exact(v.size, "vector")
    return v.reshape(n, n).copy()


def devec_right(v: HsVector) -> OperatorMatrix:
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = _isqrt_exact(v.size, "vector")
    return v.reshape(n, n).T.copy()


def is_orthonormal_basis(b: OperatorBasis, tol: Optional[float] = None) -> bool:
    """True iff max |tr(f_a* f_b) - delta_ab| <= tol."""
    tol = Config.STRUCTURAL_TOLERANCE if tol is None else tol
    if len(b) != b.dim ** 2:
        raise MalformedBasisError(f"basis of M_{b.dim} needs {b.dim ** 2} elements, got {len(b)}")
    return b.orthonormality_defect() <= tol


def require_orthonormal(b: OperatorBasis, tol: Optional[float] = None) -> None:
    if not is_orthonormal_basis(b, tol):
        raise NonOrthonormalBasisError(
            f"operator family is not orthonormal (Gram defect {b.orthonormality_defect():.3g})"
        )


def _gram_schmidt(vectors: np.ndarray, threshold: float) -> List[np.ndarray]:
    """Modified Gram-Schmidt over rows; rows with residual norm below threshold are dropped."""
    kept: List[np.ndarray] = []
    for v in vectors:
        w = v.astype(complex).copy()
        for q in kept:
            w -= np.vdot(q, w) * q
        # second pass keeps orthogonality at machine precision
        for q in kept:
            w -= np.vdot(q, w) * q
        norm = np.linalg.norm(w)
        if norm > threshold:
            kept.append(w / norm)
    return kept


def random_onb(n: int, seed: int, max_attempts: int = 5) -> OperatorBasis:
    """
    Seeded random orthonormal basis of M_n.

    Gram-Schmidt over n^2 complex-Gaussian matrices under the Hilbert-Schmidt
    product. A numerically dependent draw is retried with a derived seed.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    m = n * n
    for attempt in range(max_attempts):
        rng = np.random.default_rng([seed, attempt])
        draws = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        kept = _gram_schmidt(draws, threshold=1e-8)
        if len(kept) == m:
            return OperatorBasis(elements=np.array(kept).reshape(m, n, n))
        logger.warning(f"random_onb(n={n}, seed={seed}) attempt {attempt + 1} was degenerate, retrying")
    raise NumericalDegeneracyError(f"could not draw an independent family for n={n} after {max_attempts} attempts")


def complete_basis(f: OperatorMatrix) -> OperatorBasis:
    """ONB of M_n whose first element is f/||f||, completed against the matrix units."""
    f = _square(f, "f")
    n = f.shape[0]
    norm = np.linalg.norm(f)
    if norm == 0:
        raise DimensionMismatchError("cannot complete a basis from the zero operator")
    candidates = np.vstack([f.reshape(1, -1) / norm, np.eye(n * n, dtype=complex)])
    kept = _gram_schmidt(candidates, threshold=1e-10)
    return OperatorBasis(elements=np.array(kept[: n * n]).reshape(n * n, n, n))


def sandwich(f_a: OperatorMatrix, f_b: OperatorMatrix, A: OperatorMatrix) -> OperatorMatrix:
    """Phi_ab(A) = f_a A f_b*."""
    f_a, f_b, A = _square(f_a), _square(f_b), _square(A)
    _same_dim(f_a, f_b, A)
    return f_a @ A @ f_b.conj().T


def map_images(phi: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """Stack of phi(e_ij) in matrix-unit order."""
    return np.array([np.asarray(phi(e), dtype=complex) for e in matrix_units(n).elements])


def sandwich_images(f_a: OperatorMatrix, f_b: OperatorMatrix) -> np.ndarray:
    """Images of Phi_ab on the matrix units."""
    f_a, f_b = _square(f_a), _square(f_b)
    return map_images(lambda e: sandwich(f_a, f_b, e), f_a.shape[0])


def _check_images(images: Sequence[np.ndarray]) -> np.ndarray:
    imgs = np.asarray(images, dtype=complex)
    if imgs.ndim != 3 or imgs.shape[1] != imgs.shape[2]:
        raise MalformedBasisError(f"images must be a stack of square matrices, got shape {imgs.shape}")
    n = imgs.shape[1]
    if imgs.shape[0] != n * n:
        raise MalformedBasisError(f"a map on M_{n} needs {n * n} images, got {imgs.shape[0]}")
    return imgs


def superop_left(images: Sequence[np.ndarray]) -> SuperOperator:
    """Phi^L = sum_ij Phi(e_ij) (x) e_ij."""
    imgs = _check_images(images)
    units = matrix_units(imgs.shape[1]).elements
    return sum(np.kron(img, e) for img, e in zip(imgs, units))


def superop_right(images: Sequence[np.ndarray]) -> SuperOperator:
    """Phi^R = sum_ij e_ij (x) Phi(e_ij)."""
    imgs = _check_images(images)
    units = matrix_units(imgs.shape[1]).elements
    return sum(np.kron(e, img) for img, e in zip(imgs, units))


def superop_inner(images_phi: Sequence[np.ndarray], images_psi: Sequence[np.ndarray]) -> complex:
    """((Phi, Psi)) = sum_ij (Phi e_ij, Psi e_ij)."""
    a, b = _check_images(images_phi), _check_images(images_psi)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"maps act on different spaces: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def is_hermiticity_preserving(images: Sequence[np.ndarray], tol: Optional[float] = None) -> bool:
    """Phi(A*) = Phi(A)* for all A, checked as Phi(e_ji) = Phi(e_ij)*."""
    tol = Config.STRUCTURAL_TOLERANCE if tol is None else tol
    imgs = _check_images(images)
    n = imgs.shape[1]
    grid = imgs.reshape(n, n, n, n)
    swapped = grid.transpose(1, 0, 3, 2).conj()
    return float(np.max(np.abs(grid - swapped))) <= tol


def decompose_map(images: Sequence[np.ndarray], b: OperatorBasis) -> CoefficientMatrix:
    """
    Coefficients c_ab = ((Phi_ab, Phi)) with Phi(A) = sum c_ab f_a A f_b*.

    Args:
        images: Phi(e_ij) in matrix-unit order
        b: orthonormal basis {f_a}

    Returns:
        n^2 x n^2 complex coefficient matrix
    """
    imgs = _check_images(images)
    require_orthonormal(b)
    n = b.dim
    if imgs.shape[1] != n:
        raise DimensionMismatchError(f"map acts on M_{imgs.shape[1]} but basis spans M_{n}")
    F = b.elements
    grid = imgs.reshape(n, n, n, n)
    # c_ab = sum_ij sum_pq conj(f_a[p,i]) f_b[q,j] Phi(e_ij)[p,q]
    return np.einsum("api,bqj,ijpq->ab", F.conj(), F, grid)


def apply_expansion(c: CoefficientMatrix, b: OperatorBasis, A: OperatorMatrix) -> OperatorMatrix:
    """sum_ab c_ab f_a A f_b*."""
    A = _square(A)
    F = b.elements
    if A.shape[0] != b.dim:
        raise DimensionMismatchError(f"operator is {A.shape[0]}x{A.shape[0]}, basis spans M_{b.dim}")
    return np.einsum("ab,apq,qr,bsr->ps", np.asarray(c), F, A, F.conj())


def _fix_phases(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    V = V.copy()
    for k in range(V.shape[1]):
        pivot = V[np.argmax(np.abs(V[:, k])), k]
        V[:, k] *= np.conj(pivot) / abs(pivot)
    return V


def canonical_form(c: CoefficientMatrix, b: OperatorBasis, tol: Optional[float] = None) -> Tuple[OperatorBasis, List[float]]:
    """
    Diagonalize a Hermitian coefficient matrix: Phi(A) = sum_a c_a g_a A g_a*.

    Returns:
        (basis {g_a}, real eigenvalues c_a in ascending order)
    """
    tol = Config.STRUCTURAL_TOLERANCE if tol is None else tol
    c = np.asarray(c, dtype=complex)
    defect = float(np.max(np.abs(c - c.conj().T)))
    if defect > tol:
        raise NonHermitianError(f"coefficient matrix is not Hermitian (defect {defect:.3g})")
    values, V = np.linalg.eigh((c + c.conj().T) / 2)
    V = _fix_phases(V)
    # g_a = sum_b V[b, a] f_b
    g = np.einsum("ba,bpq->apq", V, b.elements)
    return OperatorBasis(elements=g), [float(x) for x in values]


def partial_trace(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """
    Reduced matrix on the factors listed in keep.

    Args:
        matrix: operator on the tensor product of factors with sizes dims
        dims: factor dimensions, slowest first
        keep: indices of the factors that survive, in increasing order
    """
    dims = list(dims)
    total = int(np.prod(dims))
    matrix = np.asarray(matrix)
    if matrix.shape != (total, total):
        raise DimensionMismatchError(f"matrix shape {matrix.shape} does not match factors {dims}")
    keep = sorted(keep)
    t = matrix.reshape(dims + dims)
    for axis in sorted(set(range(len(dims))) - set(keep), reverse=True):
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)
