"""Plain-text physical configuration files.

Three line forms, with '#' comments and blank lines ignored:

    strategy S2
    rep points_to key=0_1 access=CI ds=HT
    rep points_to:delta key=0_1 access=CI ds=BP
    map 2.1 -> points_to/0

A bare relation names its accumulated (base) representations; the ':delta'
and ':new' suffixes name the per-iteration ones. When a file gives ':delta'
lines but no ':new' lines the new set mirrors the delta, which is the common
case. Keys are attribute indexes joined by underscores; the fact store of
FS representations has no key, written as 'key=-'.
"""

from __future__ import annotations

from .errors import ParseError
from .frontend import Program
from .engine.config import EvalConfig
from .storage import RepConfig, render_key
from .storage.core import ACCESS_TYPES, DATA_STRUCTURES

_ROLES = ("base", "delta", "new")


def parse_key(text: str) -> tuple[int, ...] | None:
    if text == "-":
        return None
    try:
        return tuple(int(p) for p in text.split("_"))
    except ValueError:
        raise ParseError(f"bad key {text!r}")


def parse_config(text: str, program: Program) -> EvalConfig:
    strategy = "S1"
    groups: dict[str, dict[str, list[RepConfig]]] = {r: {} for r in _ROLES}
    occurrence_map: dict[tuple[int, int], tuple[int, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "strategy":
                if len(parts) != 2:
                    raise ParseError("strategy takes one argument")
                strategy = parts[1]
            elif parts[0] == "rep":
                if len(parts) != 5:
                    raise ParseError("rep takes relation key= access= ds=")
                target = parts[1]
                relation, _, role = target.partition(":")
                role = role or "base"
                if role not in _ROLES:
                    raise ParseError(f"unknown role {role!r}")
                if relation not in program.declarations:
                    raise ParseError(f"unknown relation {relation!r}")
                fields = {}
                for p in parts[2:]:
                    k, eq, v = p.partition("=")
                    if not eq or k not in ("key", "access", "ds"):
                        raise ParseError(f"bad field {p!r}")
                    fields[k] = v
                if set(fields) != {"key", "access", "ds"}:
                    raise ParseError("rep needs key=, access= and ds=")
                if fields["access"] not in ACCESS_TYPES:
                    raise ParseError(f"unknown access {fields['access']!r}")
                if fields["ds"] not in DATA_STRUCTURES:
                    raise ParseError(f"unknown structure {fields['ds']!r}")
                cfg = RepConfig(fields["access"], fields["ds"],
                                parse_key(fields["key"]))
                groups[role].setdefault(relation, []).append(cfg)
            elif parts[0] == "map":
                if len(parts) != 4 or parts[2] != "->":
                    raise ParseError("map takes rule.occ -> relation/key")
                rule_s, dot, occ_s = parts[1].partition(".")
                if not dot:
                    raise ParseError("map needs rule.occ")
                try:
                    rule_idx, occ = int(rule_s), int(occ_s)
                except ValueError:
                    raise ParseError(f"bad occurrence {parts[1]!r}")
                relation, slash, key_s = parts[3].partition("/")
                if not slash:
                    raise ParseError("map target needs relation/key")
                if not (0 <= rule_idx < len(program.rules)):
                    raise ParseError(f"rule {rule_idx} out of range")
                rule = program.rules[rule_idx]
                if not (0 <= occ < len(rule.body)):
                    raise ParseError(f"occurrence {occ} out of range")
                if rule.body[occ].relation != relation:
                    raise ParseError(
                        f"occurrence {rule_idx}.{occ} is over "
                        f"{rule.body[occ].relation!r}, not {relation!r}")
                key = parse_key(key_s)
                if key is None:
                    raise ParseError("map target needs a concrete key")
                occurrence_map[(rule_idx, occ)] = key
            else:
                raise ParseError(f"unknown directive {parts[0]!r}")
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    new = groups["new"] or {r: list(v) for r, v in groups["delta"].items()}
    return EvalConfig(base=groups["base"], delta=groups["delta"], new=new,
                      strategy=strategy, occurrence_map=occurrence_map)


def _rep_line(relation: str, role: str, cfg: RepConfig) -> str:
    target = relation if role == "base" else f"{relation}:{role}"
    key = "-" if cfg.key is None else render_key(cfg.key)
    return f"rep {target} key={key} access={cfg.access} ds={cfg.ds}"


def render_eval_config(config: EvalConfig, program: Program,
                       comments: list[str] | None = None) -> str:
    lines = [f"# {c}" for c in comments or ()]
    lines.append(f"strategy {config.strategy}")
    for relation in sorted(config.base):
        for cfg in config.base[relation]:
            lines.append(_rep_line(relation, "base", cfg))
    for relation in sorted(config.delta):
        for cfg in config.delta[relation]:
            lines.append(_rep_line(relation, "delta", cfg))
    for relation in sorted(config.new):
        if config.new[relation] != config.delta.get(relation):
            for cfg in config.new[relation]:
                lines.append(_rep_line(relation, "new", cfg))
    for (rule_idx, occ) in sorted(config.occurrence_map):
        key = config.occurrence_map[(rule_idx, occ)]
        relation = program.rules[rule_idx].body[occ].relation
        lines.append(f"map {rule_idx}.{occ} -> {relation}/{render_key(key)}")
    return "\n".join(lines) + "\n"


def render_config(selection, program: Program) -> str:
    """Render a SelectionResult in the same file format.

    Only ':delta' lines are written for the per-iteration sets; the parser
    mirrors them into the new set.
    """
    lines = []
    if selection.strategy is not None:
        lines.append(f"strategy {selection.strategy}")
    for relation in sorted(selection.base):
        for cfg in selection.base[relation]:
            lines.append(_rep_line(relation, "base", cfg))
    for relation in sorted(selection.delta):
        for cfg in selection.delta[relation]:
            lines.append(_rep_line(relation, "delta", cfg))
    for (rule_idx, occ) in sorted(selection.occurrence_map):
        key = selection.occurrence_map[(rule_idx, occ)]
        relation = program.rules[rule_idx].body[occ].relation
        lines.append(f"map {rule_idx}.{occ} -> {relation}/{render_key(key)}")
    return "\n".join(lines) + ("\n" if lines else "")
