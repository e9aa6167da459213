"""Benchmark harness: generators, the bundled workload corpus, experiment
grids, metrics collection, and trend checks."""

from .corpus import (
    CORPUS_NAMES,
    corpus_facts,
    corpus_program,
    corpus_program_text,
    desk_facts,
    read_facts_dir,
    write_facts_dir,
)
from .experiments import (
    ALL_COMBOS,
    EXPERIMENT_NAMES,
    INDEXED_COMBOS,
    auto_configuration,
    run_experiment,
)
from .generators import (
    INTERWEAVING_KEYS,
    INTERWEAVING_PROGRAM,
    gen_buildup_stream,
    gen_dense_shuffled,
    gen_interweaving,
    gen_probe_pair,
    gen_random_graph,
    load_edge_list,
)
from .metrics import (
    CSV_HEADER,
    Cell,
    ExperimentSpec,
    MetricsRow,
    emit_csv,
    load_csv,
    run_benchmark,
)
from .trends import TrendResult, run_trends

__all__ = [
    "ALL_COMBOS",
    "CORPUS_NAMES",
    "CSV_HEADER",
    "Cell",
    "EXPERIMENT_NAMES",
    "ExperimentSpec",
    "INDEXED_COMBOS",
    "INTERWEAVING_KEYS",
    "INTERWEAVING_PROGRAM",
    "MetricsRow",
    "TrendResult",
    "auto_configuration",
    "corpus_facts",
    "corpus_program",
    "corpus_program_text",
    "desk_facts",
    "emit_csv",
    "gen_buildup_stream",
    "gen_dense_shuffled",
    "gen_interweaving",
    "gen_probe_pair",
    "gen_random_graph",
    "load_csv",
    "load_edge_list",
    "read_facts_dir",
    "run_benchmark",
    "run_experiment",
    "run_trends",
    "write_facts_dir",
]
