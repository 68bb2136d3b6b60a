"""
Build and configure the LangGraph workflow.
"""
from langgraph.graph import StateGraph, END
from .graph_state import ExperimentState
from .graph_nodes import (
    build_protocol_node,
    run_outcomes_node,
    oracle_check_node,
    summarize_node,
    route_after_outcomes,
)


def build_experiment_graph():
    """Build the LangGraph workflow."""
    workflow = StateGraph(ExperimentState)

    workflow.add_node("build_protocol", build_protocol_node)
    workflow.add_node("run_outcomes", run_outcomes_node)
    workflow.add_node("oracle_check", oracle_check_node)
    workflow.add_node("summarize", summarize_node)

    workflow.set_entry_point("build_protocol")
    workflow.add_edge("build_protocol", "run_outcomes")
    workflow.add_conditional_edges(
        "run_outcomes",
        route_after_outcomes,
        {"oracle_check": "oracle_check", "summarize": "summarize"},
    )
    workflow.add_edge("oracle_check", "summarize")
    workflow.add_edge("summarize", END)

    return workflow.compile()
