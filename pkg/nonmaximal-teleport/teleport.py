"""
Teleportation engine: the maps T_a, the tripartite measurement oracle,
kappa_a, the normalized channels Upsilon_a, Bob's unitary keys W_a and
end-to-end protocol runs.

Operator ordering follows the closed form T_a(rho) = Theta(g_a rho g_a*):
for a pure resource T_a(rho) = (f g_a) rho (f g_a)* and
kappa_a = (f g_a)* (f g_a), which makes W_a = f g_a kappa_a^{-1/2} the unitary
polar factor of f g_a.
Alice's rank-one projector for outcome a is |(g_a*)^L>><<(g_a*)^L|; for
self-adjoint g_a this is sum_ij g_a e_ij g_a* (x) e_ij.
"""
import logging
from typing import List, Optional, Union

import numpy as np
import scipy.linalg
from pydantic import ValidationError

from channels import apply_cp, dual_cp, psd_inv_sqrt, psd_sqrt
from config import Config
from exceptions import (
    DimensionMismatchError,
    DimensionOverflowError,
    MissingKeyError,
    NonUnitaryError,
    NotNormalizableError,
    OutcomeIndexError,
    ZeroProbabilityError,
)
from models import InputState, OperatorMatrix, OutcomeResult, Protocol, PureResource, SuperOperator
from operator_space import partial_trace
from resource_state import projector_P, sigma_from_cp

logger = logging.getLogger(__name__)


def _max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x)))


def _alice_element(p: Protocol, alpha: int) -> np.ndarray:
    if not 0 <= alpha < len(p.alice_basis):
        raise OutcomeIndexError(f"outcome index {alpha} outside [0, {len(p.alice_basis)})")
    return p.alice_basis[alpha]


def _rho(p: Protocol, rho: Union[InputState, np.ndarray]) -> np.ndarray:
    matrix = rho.matrix if isinstance(rho, InputState) else np.asarray(rho, dtype=complex)
    if matrix.shape != (p.dim, p.dim):
        raise DimensionMismatchError(f"input state of shape {matrix.shape} does not match n={p.dim}")
    return matrix


def random_input_state(n: int, rng: np.random.Generator) -> InputState:
    """rho = G G* / tr(G G*) with complex-Gaussian G."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return InputState(matrix=rho / np.trace(rho).real)


def alice_projector(p: Protocol, alpha: int) -> SuperOperator:
    """Rank-one projector on H1 (x) H2 selected by outcome alpha."""
    g = _alice_element(p, alpha)
    return projector_P(g.conj().T)


def teleport_raw(p: Protocol, alpha: int, rho: Union[InputState, np.ndarray]) -> OperatorMatrix:
    """Unnormalized T_a(rho) = Theta(g_a rho g_a*)."""
    g = _alice_element(p, alpha)
    return apply_cp(p.resource, g @ _rho(p, rho) @ g.conj().T)


def teleport_raw_direct(p: Protocol, alpha: int, rho: Union[InputState, np.ndarray]) -> OperatorMatrix:
    """
    T_a(rho) = tr_12 (P_a (x) 1)(rho (x) sigma)(P_a (x) 1), built on the full
    n^3-dimensional space. Independent check of teleport_raw.
    """
    n = p.dim
    if n > Config.TRIPARTITE_MAX_DIM:
        raise DimensionOverflowError(f"tripartite construction limited to n <= {Config.TRIPARTITE_MAX_DIM}, got {n}")
    P = alice_projector(p, alpha)
    sigma = sigma_from_cp(p.resource).matrix
    joint = np.kron(_rho(p, rho), sigma)
    measured = np.kron(P, np.eye(n))
    post = measured @ joint @ measured
    return partial_trace(post, [n, n, n], keep=[2])


def kappa(p: Protocol, alpha: int) -> OperatorMatrix:
    """kappa_a = g_a* Theta~(I) g_a = sum_b lambda_b (f_b g_a)*(f_b g_a)."""
    g = _alice_element(p, alpha)
    return g.conj().T @ dual_cp(p.resource, np.eye(p.dim)) @ g


def kappa_sum_defect(p: Protocol) -> float:
    """max |sum_a kappa_a - I|."""
    total = sum(kappa(p, a) for a in range(len(p.alice_basis)))
    return _max_abs(total - np.eye(p.dim))


def channel_ups(p: Protocol, alpha: int, rho: Union[InputState, np.ndarray]) -> OperatorMatrix:
    """
    Trace-preserving Upsilon_a(rho) = Theta(g_a k^{-1/2} rho k^{-1/2} g_a*), k = kappa_a.

    For a pure resource this is W_a rho W_a*.

    Raises:
        NotNormalizableError: when kappa_a is rank deficient
    """
    if isinstance(p.resource, PureResource):
        W = key_unitary(p, alpha)
        return W @ _rho(p, rho) @ W.conj().T
    g = _alice_element(p, alpha)
    root = psd_inv_sqrt(kappa(p, alpha))
    return apply_cp(p.resource, g @ root @ _rho(p, rho) @ root @ g.conj().T)


def key_unitary(p: Protocol, alpha: int) -> OperatorMatrix:
    """
    W_a = f g_a kappa_a^{-1/2}, taken as the unitary polar factor of f g_a.

    Raises:
        MissingKeyError: for a mixed resource
        NotNormalizableError: when kappa_a is rank deficient
    """
    if not isinstance(p.resource, PureResource):
        raise MissingKeyError("unitary keys are defined for pure resources only")
    g = _alice_element(p, alpha)
    # rank gate only; the factor itself comes from the SVD of f g_a
    psd_inv_sqrt(kappa(p, alpha))
    W, _ = scipy.linalg.polar(p.resource.f @ g)
    return W


def unitarity_defect(W: OperatorMatrix) -> float:
    W = np.asarray(W)
    return _max_abs(W.conj().T @ W - np.eye(W.shape[0]))


def recover(state: OperatorMatrix, W: OperatorMatrix, tol: Optional[float] = None) -> OperatorMatrix:
    """Bob's correction W* state W."""
    tol = Config.RECOVERY_TOLERANCE if tol is None else tol
    W = np.asarray(W, dtype=complex)
    defect = unitarity_defect(W)
    if defect > tol:
        raise NonUnitaryError(f"key is not unitary (W*W - I defect {defect:.3g})")
    return W.conj().T @ np.asarray(state, dtype=complex) @ W


def outcome_probability(p: Protocol, alpha: int, rho: Union[InputState, np.ndarray]) -> float:
    """tr(T_a(rho)) = tr(kappa_a rho)."""
    return float(np.trace(kappa(p, alpha) @ _rho(p, rho)).real)


def post_measurement_state(p: Protocol, alpha: int, rho: Union[InputState, np.ndarray]) -> OperatorMatrix:
    """Bob's conditional state after outcome alpha, T_a(rho) / tr T_a(rho)."""
    raw = teleport_raw(p, alpha, rho)
    prob = float(np.trace(raw).real)
    if prob <= 1e-12:
        raise ZeroProbabilityError(f"outcome {alpha} has probability {prob:.3g}")
    return raw / prob


def corrected_post_measurement(p: Protocol, alpha: int, rho: Union[InputState, np.ndarray]) -> OperatorMatrix:
    """kappa^{1/2} rho kappa^{1/2} / tr(kappa rho): what the key makes of the conditional state."""
    k = kappa(p, alpha)
    root = psd_sqrt(k)
    matrix = _rho(p, rho)
    return root @ matrix @ root / np.trace(k @ matrix).real


def sample_outcome(p: Protocol, rho: Union[InputState, np.ndarray], rng: np.random.Generator) -> int:
    """Draw one measurement outcome from the exact outcome distribution."""
    probs = np.clip([outcome_probability(p, a, rho) for a in range(len(p.alice_basis))], 0.0, None)
    return int(rng.choice(len(probs), p=probs / probs.sum()))


def _run_outcome(p: Protocol, alpha: int, rho: InputState) -> OutcomeResult:
    raw = teleport_raw(p, alpha, rho)
    prob = float(np.trace(raw).real)
    fields = {"outcome_index": alpha, "probability": prob, "raw_state": raw}
    try:
        ups = channel_ups(p, alpha, rho)
    except NotNormalizableError as e:
        logger.debug(f"outcome {alpha} not normalizable: {e}")
        return OutcomeResult(**fields, status="FAILED", diagnostic=f"not normalizable: {e}")

    if prob > 1e-12:
        fields["post_measurement_defect"] = _max_abs(raw / prob - ups)
    if not p.is_pure:
        return OutcomeResult(
            **fields,
            status="NO_KEY",
            channel_state=ups,
            diagnostic="mixed resource: unitary keys are defined for pure resources only",
        )

    try:
        W = key_unitary(p, alpha)
        recovered = recover(ups, W)
        return OutcomeResult(
            **fields,
            channel_state=ups,
            key=W,
            key_unitarity_defect=unitarity_defect(W),
            recovered_state=recovered,
            recovery_error=_max_abs(recovered - rho.matrix),
        )
    except (NonUnitaryError, ValidationError) as e:
        logger.warning(f"outcome {alpha} recovery failed: {e}")
        return OutcomeResult(**fields, status="FAILED", channel_state=ups, diagnostic=f"recovery failed: {e}")


def run_protocol(p: Protocol, rho: InputState) -> List[OutcomeResult]:
    """
    Enumerate all n^2 outcomes for one input state.

    Outcomes whose kappa_a is rank deficient, or whose key fails to recover
    the input, are marked FAILED with a diagnostic instead of aborting the run.
    """
    _rho(p, rho)
    results = [_run_outcome(p, alpha, rho) for alpha in range(len(p.alice_basis))]
    failed = sum(r.failed for r in results)
    if failed:
        logger.warning(f"{failed} of {len(results)} outcomes failed")
    return results
