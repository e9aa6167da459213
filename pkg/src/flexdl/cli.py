"""Command-line interface.

Subcommands:
  run      evaluate a program over a facts directory
  profile  run under the neutral baseline and write the workload signature
  select   turn a signature into a configuration file
  bench    execute an experiment grid and write its metrics CSV
  gen      write a synthetic dataset as a facts directory
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (
    EXPERIMENT_NAMES,
    ExperimentSpec,
    emit_csv,
    gen_buildup_stream,
    gen_dense_shuffled,
    gen_interweaving,
    gen_probe_pair,
    gen_random_graph,
    run_experiment,
    write_facts_dir,
)
from .bench.corpus import read_facts_dir
from .bench.trends import run_trends
from .configfile import parse_config, render_config
from .engine import run_program
from .engine.config import STRATEGIES, uniform_config
from .errors import FlexdlError, IoError, ParseError
from .frontend import parse_program
from .profiler import ProfileResult, profile_run
from .selector import select_configuration

GENERATOR_NAMES = ("dense", "probe", "interweaving", "buildup", "graph")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def _load_program(path: str):
    try:
        return parse_program(_read_text(path))
    except ParseError as e:
        if e.path is None:
            raise ParseError(str(e), line=None, path=path) from e
        raise


def cmd_run(args) -> int:
    program = _load_program(args.program)
    facts = read_facts_dir(args.facts)
    if args.config:
        config = parse_config(_read_text(args.config), program)
    else:
        config = uniform_config(program, "CI", "BP")
    if args.strategy:
        config.strategy = args.strategy
    result = run_program(program, facts, config)
    for name in sorted(result.results):
        print(f"{name}\t{len(result.results[name])}")
    if args.dump:
        out = Path(args.dump)
        out.mkdir(parents=True, exist_ok=True)
        write_facts_dir(out, {name: sorted(rows)
                              for name, rows in result.results.items()})
        # Counters and cardinalities are deterministic; timings are not and
        # go to a separate file so counters.json can be compared bytewise.
        _write_text(out / "counters.json", json.dumps({
            "counters": result.counters.as_dict(),
            "cardinalities": result.cardinalities(),
            "footprints": result.footprints,
        }, indent=2, sort_keys=True) + "\n")
        _write_text(out / "timings.json",
                    json.dumps(result.timings.as_dict(), indent=2) + "\n")
    return 0


def cmd_profile(args) -> int:
    text = _read_text(args.program)
    program = parse_program(text)
    facts = read_facts_dir(args.facts)
    profile = profile_run(program, facts, program_text=text)
    _write_text(args.out, profile.to_json() + "\n")
    print(f"wrote signature for {len(program.rules)} rules to {args.out}")
    return 0


def cmd_select(args) -> int:
    profile = ProfileResult.from_json(_read_text(args.signature))
    if not profile.program_text:
        raise IoError(f"{args.signature} carries no program text")
    program = parse_program(profile.program_text)
    selection = select_configuration(profile, program=program,
                                     space_budget=args.space_budget)
    _write_text(args.out, render_config(selection, program))
    if args.explain:
        for line in selection.rationale:
            print(line)
    print(f"wrote configuration to {args.out}")
    return 0


def cmd_bench(args) -> int:
    if args.experiment == "trends":
        results, rows = run_trends(scale=args.scale, seed=args.seed,
                                   repetitions=args.repetitions)
        if args.csv:
            emit_csv(rows, args.csv)
        failed = False
        for res in results:
            print(res.line())
            failed = failed or not res.passed
        return 1 if failed else 0
    if not args.csv:
        raise SystemExit("bench: --csv is required")
    spec = ExperimentSpec(args.experiment, scale=args.scale, seed=args.seed,
                          repetitions=args.repetitions)
    rows = run_experiment(spec)
    emit_csv(rows, args.csv)
    errors = sum(1 for r in rows if r.error)
    print(f"wrote {len(rows)} rows to {args.csv}"
          + (f" ({errors} cells failed)" if errors else ""))
    return 0


def cmd_gen(args) -> int:
    seed = args.seed
    if args.generator == "dense":
        facts = {"r": gen_dense_shuffled(args.n, arity=args.arity,
                                         multiplicity=args.multiplicity,
                                         seed=seed)}
    elif args.generator == "probe":
        r, s = gen_probe_pair(args.r_bytes, args.s_bytes, args.partners,
                              seed=seed)
        facts = {"r": r, "s": s}
    elif args.generator == "interweaving":
        facts = gen_interweaving(args.multiplicity, seed=seed,
                                 scale=args.scale)
    elif args.generator == "buildup":
        base, stream = gen_buildup_stream(
            args.n, args.n, new_fraction=args.new_fraction,
            dup_multiplicity=args.multiplicity, ordered=args.ordered,
            seed=seed)
        facts = {"base": base, "stream": stream}
    else:
        if (args.p is None) == (args.m is None):
            raise SystemExit("gen graph: give exactly one of --p and --m")
        facts = {"edge": gen_random_graph(args.n, p=args.p, m=args.m,
                                          seed=seed)}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_facts_dir(out, facts)
    sizes = ", ".join(f"{k}={len(v)}" for k, v in sorted(facts.items()))
    print(f"wrote {sizes} to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexdl",
        description="Datalog engine with pluggable physical representations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate a program over a facts directory")
    p.add_argument("program")
    p.add_argument("--facts", required=True)
    p.add_argument("--config")
    p.add_argument("--strategy", choices=STRATEGIES)
    p.add_argument("--dump", help="directory for result relations and counters")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("profile", help="write the workload signature")
    p.add_argument("program")
    p.add_argument("--facts", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("select", help="turn a signature into a config file")
    p.add_argument("--signature", required=True)
    p.add_argument("--space-budget", type=int, default=None, metavar="BYTES")
    p.add_argument("--explain", action="store_true",
                   help="print the decision rationale")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_select)

    p = sub.add_parser("bench", help="run an experiment grid")
    p.add_argument("experiment", choices=EXPERIMENT_NAMES + ("trends",))
    p.add_argument("--scale", type=float, default=0.01,
                   help="fraction of the reference workload size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--csv", help="metrics output path")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gen", help="write a synthetic facts directory")
    p.add_argument("generator", choices=GENERATOR_NAMES)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--multiplicity", type=int, default=1)
    p.add_argument("--r-bytes", type=int, default=13107)
    p.add_argument("--s-bytes", type=int, default=1048576)
    p.add_argument("--partners", type=int, default=2)
    p.add_argument("--scale", type=float, default=0.01)
    p.add_argument("--new-fraction", type=float, default=1.0)
    p.add_argument("--ordered", action="store_true")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(fn=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FlexdlError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
