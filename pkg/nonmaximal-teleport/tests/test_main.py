"""
Tests for the experiment workflow, report formatting and the command line.
"""
import json

import numpy as np
import pytest

from config import Config, parse_config
from exceptions import ConfigError, NonUnitaryError
from graph import build_experiment_graph
from main import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, demo_config, format_report, main, run_experiment
from models import ExperimentConfig, RunReport
from sweep import property_sweep

NON_MAXIMAL_RUN = {"dim": 2, "alice": "spin", "resource": {"pure_theta": np.pi / 3}, "inputs": 10, "seed": 3}


def config(**overrides) -> ExperimentConfig:
    return ExperimentConfig.model_validate({**NON_MAXIMAL_RUN, **overrides})


def test_graph_compiles():
    assert build_experiment_graph() is not None


def test_non_maximal_run_recovers_every_input():
    report = run_experiment(config())
    assert isinstance(report, RunReport)
    assert len(report.outcomes) == 40
    assert report.resource.entropy_bits == pytest.approx(0.811278, abs=1e-6)
    assert report.resource.maximally_entangled is False
    assert report.resource.min_singular_value_f == pytest.approx(0.5, abs=1e-12)
    assert report.aggregate.max_recovery_error < 1e-9
    assert report.aggregate.max_probability_sum_defect <= 1e-10
    assert all(r.post_measurement_defect is not None for r in report.outcomes)
    assert report.aggregate.passed
    assert report.oracle_defect is None


def test_oracle_mode():
    report = run_experiment(config(oracle=True, inputs=3))
    assert report.oracle_defect is not None
    assert report.oracle_defect <= 1e-10


def test_standard_scheme_has_uniform_probabilities():
    s = 2 ** -0.5
    report = run_experiment(config(resource={"pure": [[s, 0.0], [0.0, s]]}))
    assert report.resource.maximally_entangled is True
    for r in report.outcomes:
        assert abs(r.probability - 0.25) <= 1e-10


def test_degenerate_resource_fails_every_outcome():
    report = run_experiment(config(resource={"pure_basis": {"preset": "simple_theta", "theta1": 0.0}}))
    assert report.aggregate.failed_outcomes == len(report.outcomes) == 40
    assert all(r.status == "FAILED" for r in report.outcomes)
    assert not report.aggregate.passed


def test_mixed_resource_reports_missing_keys():
    report = run_experiment(config(resource={"mixed": {"weights": [0.4, 0.3, 0.2, 0.1], "basis": "spin"}}, inputs=2))
    assert all(r.status == "NO_KEY" for r in report.outcomes)
    assert report.resource.kind == "mixed"
    np.testing.assert_allclose(report.resource.choi_spectrum, [0.4, 0.3, 0.2, 0.1], atol=1e-10)
    assert report.aggregate.passed


def test_report_is_reproducible():
    assert format_report(run_experiment(config())) == format_report(run_experiment(config()))


def test_report_rounds_floats():
    data = json.loads(format_report(run_experiment(config(inputs=1)), digits=3))
    assert data["resource"]["entropy_bits"] == 0.811
    assert data["config"]["resource"]["theta"] == 1.05


def test_unresolvable_config_raises_config_error():
    cfg = config(resource={"pure_basis": {"preset": "random"}, "index": 7})
    with pytest.raises(ConfigError):
        run_experiment(cfg)


def test_demo_presets_build():
    for preset in ("standard", "simple_theta", "rotation", "degenerate"):
        assert demo_config(preset).dim == 2
    with pytest.raises(ConfigError):
        demo_config("nope")


def test_property_sweep_passes():
    report = property_sweep(2, trials=3, seed=0)
    assert report.passed, report.defects
    assert set(report.defects) >= {"isometry", "tripartite_oracle", "complete_teleportation"}


def test_property_sweep_skips_oracle_above_five():
    assert "tripartite_oracle" not in property_sweep(6, trials=1, seed=0).defects


class TestCommandLine:
    def write_config(self, tmp_path, data):
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps(data))
        return str(path)

    def test_run_success(self, tmp_path, capsys):
        path = self.write_config(tmp_path, {**NON_MAXIMAL_RUN, "resource": {"pure_theta": 1.0472}})
        assert main(["run", "--config", path, "--oracle"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["aggregate"]["passed"] is True
        assert report["oracle_defect"] <= 1e-10

    def test_run_writes_output_file(self, tmp_path):
        path = self.write_config(tmp_path, {**NON_MAXIMAL_RUN, "resource": {"pure_theta": 1.0472}})
        out = tmp_path / "report.json"
        assert main(["run", "--config", path, "--out", str(out)]) == EXIT_OK
        assert json.loads(out.read_text())["aggregate"]["failed_outcomes"] == 0

    def test_run_degenerate_exits_nonzero(self, tmp_path):
        path = self.write_config(tmp_path, {**NON_MAXIMAL_RUN, "resource": {"pure_theta": 0.0}})
        assert main(["run", "--config", path]) == EXIT_FAILED

    def test_run_invalid_config(self, tmp_path):
        path = self.write_config(tmp_path, {**NON_MAXIMAL_RUN, "resource": {"pure": [[0.6, 0.2], [0.2, 0.6]]}})
        assert main(["run", "--config", path]) == EXIT_CONFIG

    def test_run_missing_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG

    def test_demo_standard(self, capsys):
        assert main(["demo", "--preset", "standard"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert len(report["sampled_outcomes"]) == 5
        assert all(0 <= a < 4 for a in report["sampled_outcomes"])

    def test_demo_rotation_with_angles(self):
        assert main(["demo", "--preset", "rotation", "--theta1", "0.2", "--theta2", "0.1", "--theta3", "0.3"]) == EXIT_OK

    def test_demo_degenerate(self):
        assert main(["demo", "--preset", "degenerate"]) == EXIT_FAILED

    def test_verify(self, capsys):
        assert main(["verify", "--n", "2", "--trials", "2", "--seed", "1"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["passed"] is True

    def test_verify_rejects_bad_dimension(self):
        assert main(["verify", "--n", "0"]) == EXIT_CONFIG


def test_parse_and_run_from_text():
    cfg = parse_config(json.dumps({**NON_MAXIMAL_RUN, "resource": {"pure_theta": 1.0472}, "inputs": 1}))
    assert run_experiment(cfg).aggregate.passed


def test_rotation_demo_separates_resource_angle_from_alice_rotation():
    cfg = demo_config("rotation", theta1=0.2, theta=0.9)
    assert cfg.alice.theta1 == pytest.approx(0.2)
    assert cfg.resource.theta == pytest.approx(0.9)
    assert demo_config("rotation", theta1=0.2).resource.theta == pytest.approx(np.pi / 3)


def test_numerical_failure_exits_one(monkeypatch):
    def broken_sweep(n, trials, seed):
        raise NonUnitaryError("key is not unitary")

    monkeypatch.setattr("main.property_sweep", broken_sweep)
    assert main(["verify", "--n", "2"]) == EXIT_FAILED


def test_invalid_settings_raise_config_error(monkeypatch):
    cfg = config(inputs=1)
    monkeypatch.setattr(Config, "STRUCTURAL_TOLERANCE", 0.0)
    with pytest.raises(ConfigError, match="Invalid settings"):
        run_experiment(cfg)
