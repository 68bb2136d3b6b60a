"""
Randomized property sweep behind the `verify` subcommand.
"""
import logging
from typing import Dict

import numpy as np

from exceptions import NotNormalizableError
from models import CpMapSpec, Protocol, PureResource, VerificationReport
from operator_space import (
    apply_expansion,
    decompose_map,
    hs_inner,
    map_images,
    random_onb,
    vec_left,
    vec_right,
)
from resource_state import choi_spectrum
from teleport import (
    channel_ups,
    kappa_sum_defect,
    key_unitary,
    outcome_probability,
    random_input_state,
    recover,
    teleport_raw,
    teleport_raw_direct,
    unitarity_defect,
)

logger = logging.getLogger(__name__)

THRESHOLDS: Dict[str, float] = {
    "isometry": 1e-12,
    "decomposition": 1e-10,
    "choi_spectrum": 1e-10,
    "kappa_sum": 1e-10,
    "probability_sum": 1e-10,
    "tripartite_oracle": 1e-10,
    "key_unitarity": 1e-9,
    "complete_teleportation": 1e-8,
}

ORACLE_MAX_DIM = 5


def _random_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _random_pure(n: int, rng: np.random.Generator) -> PureResource:
    f = _random_matrix(n, rng)
    return PureResource(f=f / np.linalg.norm(f))


def _random_cp(n: int, rng: np.random.Generator, seed: int) -> CpMapSpec:
    weights = rng.dirichlet(np.ones(n * n))
    return CpMapSpec(weights=weights / weights.sum(), basis=random_onb(n, seed))


def property_sweep(n: int, trials: int, seed: int) -> VerificationReport:
    """
    Run every randomized property check `trials` times at dimension n.

    Returns:
        VerificationReport with the largest defect seen for each property
    """
    rng = np.random.default_rng(seed)
    defects = {name: 0.0 for name in THRESHOLDS}
    if n > ORACLE_MAX_DIM:
        defects.pop("tripartite_oracle")

    def record(name: str, value: float):
        defects[name] = max(defects[name], float(value))

    for trial in range(trials):
        trial_seed = seed * 100003 + trial
        A, B = _random_matrix(n, rng), _random_matrix(n, rng)
        record("isometry", abs(hs_inner(A, B) - np.vdot(vec_left(A), vec_left(B))))
        record("isometry", abs(hs_inner(A, B) - np.vdot(vec_right(A), vec_right(B))))

        basis = random_onb(n, trial_seed)
        kraus = [_random_matrix(n, rng) for _ in range(2)]
        images = map_images(lambda e: sum(K @ e @ K.conj().T for K in kraus), n)
        c = decompose_map(images, basis)
        rebuilt = map_images(lambda e: apply_expansion(c, basis, e), n)
        record("decomposition", np.max(np.abs(rebuilt - images)))

        mixed = _random_cp(n, rng, trial_seed + 1)
        spectrum = choi_spectrum(mixed)
        record("choi_spectrum", np.max(np.abs(np.array(spectrum) - np.sort(mixed.weights)[::-1])))

        alice = random_onb(n, trial_seed + 2)
        rho = random_input_state(n, rng)
        for resource in (mixed, _random_pure(n, rng)):
            p = Protocol(alice_basis=alice, resource=resource)
            record("kappa_sum", kappa_sum_defect(p))
            total = sum(outcome_probability(p, a, rho) for a in range(n * n))
            record("probability_sum", abs(total - 1.0))
            if "tripartite_oracle" in defects:
                for a in range(n * n):
                    record("tripartite_oracle", np.max(np.abs(teleport_raw(p, a, rho) - teleport_raw_direct(p, a, rho))))
            if not isinstance(resource, PureResource):
                continue
            for a in range(n * n):
                try:
                    W = key_unitary(p, a)
                    ups = channel_ups(p, a, rho)
                except NotNormalizableError as e:
                    logger.debug(f"trial {trial} outcome {a} skipped: {e}")
                    continue
                record("key_unitarity", unitarity_defect(W))
                record("complete_teleportation", np.max(np.abs(recover(ups, W) - rho.matrix)))

    failures = [name for name, value in defects.items() if value > THRESHOLDS[name]]
    for name in failures:
        logger.error(f"property {name} failed: defect {defects[name]:.3g} > {THRESHOLDS[name]:.1e}")
    return VerificationReport(
        dim=n,
        trials=trials,
        seed=seed,
        defects=defects,
        thresholds={name: THRESHOLDS[name] for name in defects},
        failures=failures,
        passed=not failures,
    )
