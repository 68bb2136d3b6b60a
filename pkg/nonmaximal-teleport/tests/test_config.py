"""
Tests for settings and experiment document parsing.
"""
import json

import numpy as np
import pytest

from config import Config, parse_config
from exceptions import ConfigError
from presets import build_inputs, build_protocol


def document(**overrides):
    data = {"dim": 2, "alice": "spin", "resource": {"pure_theta": 1.0472}}
    data.update(overrides)
    return json.dumps(data)


def test_settings_are_valid():
    assert Config.validate()


def test_validate_rejects_non_positive_tolerance(monkeypatch):
    monkeypatch.setattr(Config, "STRUCTURAL_TOLERANCE", 0.0)
    with pytest.raises(ValueError):
        Config.validate()


def test_minimal_document_gets_defaults():
    cfg = parse_config(document())
    assert cfg.dim == 2
    assert cfg.alice.preset == "spin"
    assert cfg.resource.kind == "pure"
    assert cfg.resource.theta == pytest.approx(1.0472)
    assert cfg.seed == 0
    assert cfg.inputs.random == 10
    assert cfg.tolerances.structural == pytest.approx(1e-10)
    assert cfg.tolerances.recovery == pytest.approx(1e-9)


def test_minimal_document_resolves_to_diagonal_resource():
    cfg = parse_config(document())
    p = build_protocol(cfg)
    np.testing.assert_allclose(p.resource.f, np.diag([np.cos(1.0472), np.sin(1.0472)]), atol=1e-15)
    assert len(build_inputs(cfg.inputs, cfg.dim, cfg.seed)) == 10


def test_weights_must_sum_to_one():
    resource = {"mixed": {"weights": [0.5, 0.6, 0.0, 0.0], "basis": "spin"}}
    with pytest.raises(ConfigError, match="weights sum to 1.1"):
        parse_config(document(resource=resource))


def test_weights_within_tolerance_are_renormalized():
    resource = {"mixed": {"weights": [0.5, 0.3, 0.2 + 5e-10, 0.0], "basis": "spin"}}
    p = build_protocol(parse_config(document(resource=resource)))
    assert abs(p.resource.weights.sum() - 1.0) <= 1e-15


def test_unnormalized_resource_names_trace():
    resource = {"pure": [[0.6, 0.2], [0.2, 0.6]]}
    with pytest.raises(ConfigError, match=r"tr\(f\*f\) = 0\.8"):
        parse_config(document(resource=resource))


def test_complex_entries():
    resource = {"pure": [[[0.6, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.8]]]}
    p = build_protocol(parse_config(document(resource=resource)))
    np.testing.assert_allclose(p.resource.f, np.diag([0.6, 0.8j]), atol=1e-15)


@pytest.mark.parametrize("text", [
    "{not json",
    document(alice="bogus"),
    document(resource={"pure": [[0.6, 0.0], [0.8]]}),
    document(resource={"pure": [[1.0, 0.0, 0.0]]}),
    document(resource={"pure_theta": float("inf")}),
    document(alice={"preset": "simple_theta"}),
    document(dim=3),
    document(dim=0),
    document(resource={"something": 1}),
    document(inputs={"matrices": [[[1.0, 0.0], [0.0, 1.0]]]}),
])
def test_invalid_documents(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_error_names_source():
    with pytest.raises(ConfigError, match="experiment.json"):
        parse_config("[", source="experiment.json")


def test_explicit_alice_basis_and_inputs():
    s = 2 ** -0.5
    cfg = parse_config(document(
        alice={"matrices": [[[s, 0], [0, s]], [[0, s], [s, 0]], [[0, [0, -s]], [[0, s], 0]], [[s, 0], [0, -s]]]},
        inputs={"matrices": [[[0.5, 0.0], [0.0, 0.5]]], "random": 2},
        seed=7,
    ))
    assert cfg.alice.preset == "explicit"
    p = build_protocol(cfg)
    assert p.alice_basis.orthonormality_defect() <= 1e-12
    inputs = build_inputs(cfg.inputs, cfg.dim, cfg.seed)
    assert len(inputs) == 3
    np.testing.assert_allclose(inputs[0].matrix, np.eye(2) / 2)


def test_random_inputs_are_seeded():
    cfg = parse_config(document(seed=5))
    first = build_inputs(cfg.inputs, cfg.dim, cfg.seed)
    second = build_inputs(cfg.inputs, cfg.dim, cfg.seed)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.matrix, b.matrix)


def test_random_alice_basis_and_mixed_resource_in_dimension_three():
    cfg = parse_config(json.dumps({
        "dim": 3,
        "alice": "random",
        "resource": {"mixed": {"weights": [0.5, 0.3, 0.2] + [0.0] * 6, "basis": {"preset": "random", "seed": 11}}},
        "inputs": 2,
    }))
    p = build_protocol(cfg)
    assert p.dim == 3
    assert not p.is_pure
