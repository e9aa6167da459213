import random

import pytest

from flexdl.engine.config import STRATEGIES, uniform_config
from flexdl.engine.run import run_program
from flexdl.frontend import parse_program

ALL_COMBOS = [(a, d)
              for a in ("CI", "UKI", "UPI")
              for d in ("SA", "BP", "HT", "RX")] + [("FS", "RS")]


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240817)


def run_uniform(program_text, facts, access, ds, strategy="S1"):
    program = parse_program(program_text)
    config = uniform_config(program, access, ds, strategy=strategy)
    return run_program(program, facts, config)


def result_set(run_result, relation):
    return frozenset(run_result.results[relation])


def combos_and_strategies():
    return [(a, d, s) for a, d in ALL_COMBOS for s in STRATEGIES]
