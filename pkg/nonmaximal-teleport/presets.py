"""
Resolve validated experiment documents into protocols and input states.
"""
import logging
from typing import List

import numpy as np

from models import (
    BasisSpec,
    CpMapSpec,
    ExperimentConfig,
    InputSpec,
    InputState,
    OperatorBasis,
    Protocol,
    PureResource,
    Resource,
    ResourceSpec,
    RotationAngles,
    decode_matrix,
)
from operator_space import matrix_units, random_onb
from qubit_examples import basis_from_orthogonal, rotation_C, simple_theta_basis, spin_basis
from teleport import random_input_state

logger = logging.getLogger(__name__)

# Offsets keep the random streams of the different config sections independent
_ALICE_STREAM = 1
_RESOURCE_STREAM = 2
_INPUT_STREAM = 3


def build_basis(spec: BasisSpec, dim: int, seed: int) -> OperatorBasis:
    """Materialize a basis preset."""
    if spec.preset == "spin":
        return spin_basis()
    if spec.preset == "matrix_units":
        return matrix_units(dim)
    if spec.preset == "simple_theta":
        theta2 = spec.theta1 if spec.theta2 is None else spec.theta2
        return simple_theta_basis(spec.theta1, theta2)
    if spec.preset == "rotation":
        angles = RotationAngles(theta1=spec.theta1 or 0.0, theta2=spec.theta2 or 0.0, theta3=spec.theta3 or 0.0)
        return basis_from_orthogonal(rotation_C(angles))
    if spec.preset == "random":
        return random_onb(dim, seed if spec.seed is None else spec.seed)
    return OperatorBasis(elements=np.array(spec.decoded()))


def build_resource(spec: ResourceSpec, dim: int, seed: int) -> Resource:
    """
    Materialize the resource. Explicit operators and weights are renormalized
    after the document-level 1e-9 check.
    """
    if spec.kind == "mixed":
        basis = build_basis(spec.basis, dim, seed + _RESOURCE_STREAM)
        weights = np.asarray(spec.weights, dtype=float)
        return CpMapSpec(weights=weights / weights.sum(), basis=basis)

    if spec.theta is not None:
        f = np.diag([np.cos(spec.theta), np.sin(spec.theta)]).astype(complex)
    elif spec.matrix is not None:
        f = decode_matrix(spec.matrix)
    else:
        basis = build_basis(spec.basis, dim, seed + _RESOURCE_STREAM)
        if spec.index >= len(basis):
            raise ValueError(f"resource index {spec.index} outside basis of {len(basis)} elements")
        f = basis[spec.index]
    return PureResource(f=f / np.linalg.norm(f))


def build_inputs(spec: InputSpec, dim: int, seed: int) -> List[InputState]:
    """Explicit states followed by seeded random ones."""
    states = [InputState(matrix=decode_matrix(rows)) for rows in spec.matrices or []]
    if spec.random:
        rng = np.random.default_rng([seed, _INPUT_STREAM])
        states.extend(random_input_state(dim, rng) for _ in range(spec.random))
    return states


def build_protocol(cfg: ExperimentConfig) -> Protocol:
    alice = build_basis(cfg.alice, cfg.dim, cfg.seed + _ALICE_STREAM)
    resource = build_resource(cfg.resource, cfg.dim, cfg.seed)
    logger.info(f"Protocol built: n={cfg.dim}, alice={cfg.alice.preset}, resource={cfg.resource.kind}")
    return Protocol(alice_basis=alice, resource=resource)
