"""
Shared fixtures for the teleportation tests.
"""
import numpy as np
import pytest

from models import InputState, Protocol, PureResource
from qubit_examples import spin_basis, spin_matrices


def _diagonal(theta: float) -> PureResource:
    return PureResource(f=np.diag([np.cos(theta), np.sin(theta)]))


@pytest.fixture
def diagonal_resource():
    """Factory for f = diag(cos theta, sin theta)."""
    return _diagonal


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def spins():
    return spin_matrices()


@pytest.fixture
def spin_protocol():
    """Spin Alice basis with the theta = pi/3 diagonal resource."""
    return Protocol(alice_basis=spin_basis(), resource=_diagonal(np.pi / 3))


@pytest.fixture
def e11():
    return InputState(matrix=[[1, 0], [0, 0]])
