"""Semi-random graph process: online strategies, offline solvers, constants and experiments."""

from .engine import OfferSequence, RunRecord, StopCondition, run, run_graph, run_offline
from .multigraph import DegreeMode, MultiGraph

__all__ = [
    "DegreeMode",
    "MultiGraph",
    "OfferSequence",
    "RunRecord",
    "StopCondition",
    "run",
    "run_graph",
    "run_offline",
]
