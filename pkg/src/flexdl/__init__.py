"""flexdl: an in-memory Datalog engine with pluggable physical
representations, a workload profiler, and an automatic configurator."""

__version__ = "0.1.0"
