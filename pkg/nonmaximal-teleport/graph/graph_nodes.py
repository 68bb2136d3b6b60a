"""
LangGraph node functions for the experiment workflow.
"""
import logging
from collections import defaultdict
from typing import Any, Dict

import numpy as np

from .graph_state import ExperimentState
from config import Config
from exceptions import TeleportError
from models import AggregateSummary, OutcomeRecord, PureResource, ResourceDiagnostics, RunReport
from presets import build_inputs, build_protocol
from resource_state import choi_spectrum, entanglement_entropy, is_maximally_entangled, schmidt_values
from teleport import run_protocol, teleport_raw, teleport_raw_direct

logger = logging.getLogger(__name__)

# Failures a single stage can survive; anything else is a programming error
STAGE_ERRORS = (TeleportError, ValueError, ArithmeticError)


def build_protocol_node(state: ExperimentState) -> Dict[str, Any]:
    """Resolve the config into a protocol and input states."""
    cfg = state["config"]
    stats = state.get("stats", {})
    try:
        protocol = build_protocol(cfg)
        inputs = build_inputs(cfg.inputs, cfg.dim, cfg.seed)
    except STAGE_ERRORS as e:
        logger.error(f"Could not build protocol: {e}")
        return {
            "protocol": None,
            "inputs": [],
            "errors": [f"protocol build error: {e}"],
            "stats": stats | {"protocol_built": False},
        }

    logger.info(f"Resolved {len(inputs)} input state(s)")
    return {
        "protocol": protocol,
        "inputs": inputs,
        "stats": stats | {"protocol_built": True, "inputs": len(inputs)},
    }


def run_outcomes_node(state: ExperimentState) -> Dict[str, Any]:
    """Run every outcome for every input state."""
    protocol = state.get("protocol")
    stats = state.get("stats", {})
    if protocol is None:
        return {"outcome_records": []}

    records = []
    new_errors = []
    for i, rho in enumerate(state.get("inputs", [])):
        try:
            results = run_protocol(protocol, rho)
        except STAGE_ERRORS as e:
            logger.error(f"Error running input {i}: {e}")
            new_errors.append(f"run error for input {i}: {e}")
            continue
        records.extend(
            OutcomeRecord(
                input_index=i,
                outcome=r.outcome_index,
                status=r.status,
                probability=r.probability,
                recovery_error=r.recovery_error,
                key_unitarity_defect=r.key_unitarity_defect,
                post_measurement_defect=r.post_measurement_defect,
                diagnostic=r.diagnostic,
            )
            for r in results
        )

    logger.info(f"Evaluated {len(records)} outcome(s)")
    return {
        "outcome_records": records,
        "errors": new_errors,
        "stats": stats | {"outcomes": len(records)},
    }


def route_after_outcomes(state: ExperimentState) -> str:
    """Send the run through the tripartite oracle when it is enabled and affordable."""
    cfg = state["config"]
    if not cfg.oracle or state.get("protocol") is None:
        return "summarize"
    if cfg.dim > Config.ORACLE_MAX_DIM:
        logger.warning(f"Oracle skipped: dim {cfg.dim} exceeds TELEPORT_ORACLE_MAX_DIM={Config.ORACLE_MAX_DIM}")
        return "summarize"
    return "oracle_check"


def oracle_check_node(state: ExperimentState) -> Dict[str, Any]:
    """Compare the closed-form T_a against the explicit tripartite construction."""
    protocol = state["protocol"]
    stats = state.get("stats", {})
    worst = 0.0
    try:
        for rho in state.get("inputs", []):
            for alpha in range(len(protocol.alice_basis)):
                diff = teleport_raw(protocol, alpha, rho) - teleport_raw_direct(protocol, alpha, rho)
                worst = max(worst, float(np.max(np.abs(diff))))
    except STAGE_ERRORS as e:
        logger.error(f"Oracle comparison failed: {e}")
        return {"oracle_defect": None, "errors": [f"oracle error: {e}"]}

    logger.info(f"Oracle defect: {worst:.3g}")
    return {"oracle_defect": worst, "stats": stats | {"oracle_checked": True}}


def _resource_diagnostics(state: ExperimentState) -> ResourceDiagnostics:
    protocol = state["protocol"]
    tol = state["config"].tolerances.structural
    alice_sv = [float(np.linalg.svd(g, compute_uv=False)[-1]) for g in protocol.alice_basis.elements]
    spectrum = choi_spectrum(protocol.resource)
    if not isinstance(protocol.resource, PureResource):
        return ResourceDiagnostics(kind="mixed", min_singular_values_alice=alice_sv, choi_spectrum=spectrum)

    f = protocol.resource.f
    values = schmidt_values(f)
    return ResourceDiagnostics(
        kind="pure",
        schmidt_values=values,
        entropy_bits=entanglement_entropy(f),
        maximally_entangled=is_maximally_entangled(f, tol=tol),
        min_singular_value_f=values[-1],
        min_singular_values_alice=alice_sv,
        choi_spectrum=spectrum,
    )


def _optional_max(values) -> Any:
    values = [v for v in values if v is not None]
    return max(values) if values else None


def summarize_node(state: ExperimentState) -> Dict[str, Any]:
    """Aggregate the outcome records into the run report."""
    cfg = state["config"]
    records = state.get("outcome_records", [])
    errors = state.get("errors", [])
    oracle_defect = state.get("oracle_defect")

    totals = defaultdict(float)
    for r in records:
        totals[r.input_index] += r.probability
    prob_defect = max((abs(t - 1.0) for t in totals.values()), default=0.0)

    aggregate = AggregateSummary(
        max_recovery_error=_optional_max(r.recovery_error for r in records),
        max_probability_sum_defect=prob_defect,
        max_key_unitarity_defect=_optional_max(r.key_unitarity_defect for r in records),
        max_post_measurement_defect=_optional_max(r.post_measurement_defect for r in records),
        failed_outcomes=sum(r.status == "FAILED" for r in records),
    )
    hard_failures = [
        aggregate.failed_outcomes > 0,
        aggregate.max_recovery_error is not None and aggregate.max_recovery_error > cfg.tolerances.recovery,
        prob_defect > cfg.tolerances.structural,
        oracle_defect is not None and oracle_defect > cfg.tolerances.structural,
        bool(errors),
    ]
    aggregate = aggregate.model_copy(update={"passed": not any(hard_failures)})

    report = RunReport(
        config=cfg.model_dump(mode="json"),
        resource=_resource_diagnostics(state) if state.get("protocol") is not None else None,
        outcomes=records,
        aggregate=aggregate,
        oracle_defect=oracle_defect,
        errors=list(errors),
    )
    return {"report": report, "stats": state.get("stats", {}) | {"passed": aggregate.passed}}
