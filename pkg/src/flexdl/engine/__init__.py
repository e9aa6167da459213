"""Evaluation engine: configurations, join plans, duplicate-elimination
strategies, the semi-naive driver, and the naive reference evaluator."""

from .analysis import (
    BASE_ROLE,
    DELTA_ROLE,
    EDB_ROLE,
    NEW_ROLE,
    bound_positions,
    chain_key,
    keys_for_sets,
    min_chain_cover,
    recursive_occurrences,
)
from .config import STRATEGIES, EvalConfig, uniform_config
from .counters import OpCounters, OpCounts, PhaseTimings
from .naive import naive_eval
from .plan import JoinPlan, RepHandle, execute_plan, plan_rule
from .run import RelationRT, RunResult, run_program
from .strategies import SeedSink, apply_strategy, make_strategy

__all__ = [
    "BASE_ROLE", "DELTA_ROLE", "EDB_ROLE", "NEW_ROLE",
    "bound_positions", "chain_key", "keys_for_sets", "min_chain_cover",
    "recursive_occurrences",
    "STRATEGIES", "EvalConfig", "uniform_config",
    "OpCounters", "OpCounts", "PhaseTimings",
    "naive_eval",
    "JoinPlan", "RepHandle", "execute_plan", "plan_rule",
    "RelationRT", "RunResult", "run_program",
    "SeedSink", "apply_strategy", "make_strategy",
]
