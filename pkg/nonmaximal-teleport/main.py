"""
Command-line entry point for the teleportation simulator (LangGraph version).

Subcommands:
    run     --config <path> [--oracle] [--out <path>]
    demo    --preset <name> [--theta1 --theta2 --theta3 --theta] [--out <path>]
    verify  --n <dim> --trials <k> --seed <s> [--out <path>]

Exit codes: 0 success, 1 verification or numerical failure, 2 configuration error.
"""
import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from config import Config, parse_config
from exceptions import ConfigError, TeleportError
from graph import ExperimentState, build_experiment_graph
from models import ExperimentConfig, RunReport
from presets import build_inputs, build_protocol
from sweep import property_sweep
from teleport import sample_outcome

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

DEMO_PRESETS = ("standard", "simple_theta", "rotation", "degenerate")


def setup_logging():
    """Send log records to stderr and, when TELEPORT_LOG_FILE is set, to a file."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_FILE:
        handlers.append(logging.FileHandler(Config.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


logger = logging.getLogger(__name__)


class ExperimentRunner:
    """Main orchestrator for experiment runs using LangGraph."""

    def __init__(self):
        try:
            Config.validate()
        except ValueError as e:
            raise ConfigError(f"Invalid settings: {e}") from e
        self.graph = build_experiment_graph()
        logger.debug("ExperimentRunner initialized with LangGraph")

    def run(self, cfg: ExperimentConfig) -> RunReport:
        """
        Run one experiment through the workflow.

        Raises:
            ConfigError: when the config cannot be resolved into a protocol
        """
        logger.info("=" * 60)
        logger.info(f"Starting experiment (n={cfg.dim}, seed={cfg.seed})")
        logger.info("=" * 60)

        initial_state: ExperimentState = {
            "config": cfg,
            "protocol": None,
            "inputs": [],
            "outcome_records": [],
            "oracle_defect": None,
            "report": None,
            "errors": [],
            "stats": {},
        }
        final_state = self.graph.invoke(initial_state)

        if final_state.get("protocol") is None:
            raise ConfigError("; ".join(final_state.get("errors", [])) or "protocol could not be built")

        errors = final_state.get("errors", [])
        if errors:
            logger.warning(f"Encountered {len(errors)} errors during processing")
            for error in errors:
                logger.warning(f"  - {error}")
        logger.info(f"Processing stats: {final_state.get('stats', {})}")
        return final_state["report"]


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Deterministic for a fixed config and seed."""
    return ExperimentRunner().run(cfg)


def _round(value: Any, digits: int) -> Any:
    if isinstance(value, float):
        return float(f"{value:.{digits}g}") if math.isfinite(value) else str(value)
    if isinstance(value, dict):
        return {k: _round(v, digits) for k, v in value.items()}
    if isinstance(value, list):
        return [_round(v, digits) for v in value]
    return value


def format_report(report: BaseModel, digits: Optional[int] = None) -> str:
    """JSON text with every float rounded to a fixed number of significant digits."""
    digits = Config.REPORT_DIGITS if digits is None else digits
    return json.dumps(_round(report.model_dump(mode="json"), digits), indent=2)


def demo_config(preset: str, theta1: Optional[float] = None, theta2: Optional[float] = None,
                theta3: Optional[float] = None, theta: Optional[float] = None) -> ExperimentConfig:
    """
    Experiment documents behind the `demo` presets.

    theta is the resource angle of the rotation preset, whose theta1..theta3
    rotate Alice's basis.
    """
    t1 = math.pi / 3 if theta1 is None else theta1
    if preset == "standard":
        s = 1 / math.sqrt(2)
        resource = {"pure": [[s, 0.0], [0.0, s]]}
        alice = "spin"
    elif preset == "simple_theta":
        resource = {"pure_basis": {"preset": "simple_theta", "theta1": t1, "theta2": theta2}, "index": 0}
        alice = "spin"
    elif preset == "rotation":
        resource = {"pure_theta": math.pi / 3 if theta is None else theta}
        alice = {
            "preset": "rotation",
            "theta1": 0.3 if theta1 is None else theta1,
            "theta2": 0.5 if theta2 is None else theta2,
            "theta3": 0.7 if theta3 is None else theta3,
        }
    elif preset == "degenerate":
        resource = {"pure_basis": {"preset": "simple_theta", "theta1": 0.0}, "index": 0}
        alice = "spin"
    else:
        raise ConfigError(f"Unknown demo preset '{preset}', expected one of {', '.join(DEMO_PRESETS)}")

    try:
        return ExperimentConfig.model_validate(
            {"dim": 2, "alice": alice, "resource": resource, "inputs": {"random": 5}, "oracle": True}
        )
    except ValidationError as e:
        raise ConfigError(f"Invalid demo parameters: {e}") from e


def log_summary(report: RunReport):
    """Human-readable summary table on stderr."""
    logger.info(f"{'input':>5} {'alpha':>5} {'status':>7} {'probability':>12} {'recovery':>10}")
    for r in report.outcomes:
        recovery = "-" if r.recovery_error is None else f"{r.recovery_error:.2e}"
        logger.info(f"{r.input_index:>5} {r.outcome:>5} {r.status:>7} {r.probability:>12.6f} {recovery:>10}")
    if report.resource is not None and report.resource.entropy_bits is not None:
        logger.info(
            f"Resource entropy {report.resource.entropy_bits:.6f} bits, "
            f"maximally entangled: {report.resource.maximally_entangled}"
        )
    agg = report.aggregate
    logger.info(f"Probability-sum defect: {agg.max_probability_sum_defect:.3g}")
    if agg.max_recovery_error is not None:
        logger.info(f"Max recovery error: {agg.max_recovery_error:.3g}")
    if report.oracle_defect is not None:
        logger.info(f"Oracle defect: {report.oracle_defect:.3g}")
    logger.info(f"Failed outcomes: {agg.failed_outcomes}, passed: {agg.passed}")


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text + "\n")
        logger.info(f"Report written to {out}")
    else:
        print(text)


def cmd_run(args) -> int:
    path = Path(args.config)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    cfg = parse_config(text, source=str(path))
    if args.oracle:
        cfg = cfg.model_copy(update={"oracle": True})
    report = run_experiment(cfg)
    log_summary(report)
    _emit(format_report(report), args.out)
    return EXIT_OK if report.aggregate.passed else EXIT_FAILED


def cmd_demo(args) -> int:
    cfg = demo_config(args.preset, args.theta1, args.theta2, args.theta3, args.theta)
    report = run_experiment(cfg)

    # One seeded measurement per input, drawn from the exact outcome distribution
    protocol = build_protocol(cfg)
    rng = np.random.default_rng(cfg.seed)
    sampled = [sample_outcome(protocol, rho, rng) for rho in build_inputs(cfg.inputs, cfg.dim, cfg.seed)]
    report = report.model_copy(update={"sampled_outcomes": sampled})

    log_summary(report)
    _emit(format_report(report), args.out)
    return EXIT_OK if report.aggregate.passed else EXIT_FAILED


def cmd_verify(args) -> int:
    if args.n < 1 or args.n > Config.TRIPARTITE_MAX_DIM:
        raise ConfigError(f"--n must lie in [1, {Config.TRIPARTITE_MAX_DIM}], got {args.n}")
    if args.trials < 1:
        raise ConfigError(f"--trials must be positive, got {args.trials}")
    report = property_sweep(args.n, args.trials, args.seed)
    for name, value in report.defects.items():
        logger.info(f"{name:>24}: {value:.3e} (threshold {report.thresholds[name]:.0e})")
    _emit(format_report(report), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonmaximal-teleport",
        description="Teleportation with non-maximally entangled resources",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment described by a JSON config")
    run.add_argument("--config", required=True, help="Path to the experiment JSON")
    run.add_argument("--oracle", action="store_true", help="Compare against the tripartite construction")
    run.add_argument("--out", help="Write the JSON report here instead of stdout")
    run.set_defaults(handler=cmd_run)

    demo = sub.add_parser("demo", help="Run a built-in qubit example")
    demo.add_argument("--preset", required=True, choices=DEMO_PRESETS)
    demo.add_argument("--theta1", type=float)
    demo.add_argument("--theta2", type=float)
    demo.add_argument("--theta3", type=float)
    demo.add_argument("--theta", type=float, help="Resource angle for the rotation preset")
    demo.add_argument("--out", help="Write the JSON report here instead of stdout")
    demo.set_defaults(handler=cmd_demo)

    verify = sub.add_parser("verify", help="Randomized property sweep")
    verify.add_argument("--n", type=int, default=2, help="Dimension")
    verify.add_argument("--trials", type=int, default=10)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", help="Write the JSON report here instead of stdout")
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except ValidationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except TeleportError as e:
        logger.error(f"Run failed: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
