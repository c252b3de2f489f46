"""Multiobjective fractal decomposition search with Tchebycheff scalarization."""

__version__ = "0.1.0"

from .benchmarks import PROBLEM_NAMES, BenchmarkProblem, TrueFront, evaluate, get_problem, true_front
from .exceptions import (
    DimensionError,
    DomainError,
    IncompleteDataError,
    MofdaError,
    ProtocolError,
    RunnerError,
    UndefinedMetricError,
    UnknownProblemError,
    UnsupportedObjectiveCountError,
)
from .geometry import BoxBounds, Hypersphere, decompose, to_problem_space, unit_root
from .metrics import MetricReport, evaluate_front, gd, hypervolume, igd, spread
from .runner import ParetoArchive, execute_task, nondominated_filter, run_mo_fda
from .scalarization import ReferencePoint, WeightVector, generate_weights, scalarize_problem, tchebycheff
from .solver import SolverConfig, SolverResult, fda_solve, ils, score_sphere
from .stats import RankTable, friedman_ranks, report

__all__ = [
    "PROBLEM_NAMES",
    "BenchmarkProblem",
    "BoxBounds",
    "DimensionError",
    "DomainError",
    "Hypersphere",
    "IncompleteDataError",
    "MetricReport",
    "MofdaError",
    "ParetoArchive",
    "ProtocolError",
    "RankTable",
    "ReferencePoint",
    "RunnerError",
    "SolverConfig",
    "SolverResult",
    "TrueFront",
    "UndefinedMetricError",
    "UnknownProblemError",
    "UnsupportedObjectiveCountError",
    "WeightVector",
    "decompose",
    "evaluate",
    "evaluate_front",
    "execute_task",
    "fda_solve",
    "friedman_ranks",
    "gd",
    "generate_weights",
    "get_problem",
    "hypervolume",
    "igd",
    "ils",
    "nondominated_filter",
    "report",
    "run_mo_fda",
    "scalarize_problem",
    "score_sphere",
    "spread",
    "tchebycheff",
    "to_problem_space",
    "true_front",
    "unit_root",
]
