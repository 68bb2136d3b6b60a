"""
State schema for the experiment workflow.
"""
import operator
from typing import Annotated, List, Optional, TypedDict

from models import ExperimentConfig, InputState, OutcomeRecord, Protocol, RunReport


class ExperimentState(TypedDict):
    """State that flows through the LangGraph."""
    # Input
    config: ExperimentConfig

    # Processing
    protocol: Optional[Protocol]
    inputs: List[InputState]
    outcome_records: List[OutcomeRecord]
    oracle_defect: Optional[float]

    # Output
    report: Optional[RunReport]

    # Metadata
    errors: Annotated[List[str], operator.add]  # Accumulate errors across nodes
    stats: dict
