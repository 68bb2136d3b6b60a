"""
LangGraph workflow package for teleportation experiments.
"""
from .graph_builder import build_experiment_graph
from .graph_state import ExperimentState

__all__ = ['build_experiment_graph', 'ExperimentState']
