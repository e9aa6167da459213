"""Datalog frontend: program text to stratified rule sets.

Grammar (one statement per line, '%' starts a comment, trailing '.' optional):

    decl  :=  ".decl" name "/" arity [".edb" | ".idb"]
    rule  :=  atom ":-" atom ("," atom)*
    atom  :=  name "(" term ("," term)* ")"
    term  :=  variable | unsigned-integer

Relation names match [A-Za-z_][A-Za-z0-9_]*. Arity is inferred from first
use when not declared; a relation is IDB iff declared so or it appears in
some head. Constants are unsigned 64-bit values and act as equality
filters when they appear in bodies.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    ArityMismatchError,
    EdbInHeadError,
    ParseError,
    UnsafeRuleError,
)

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_NAME_RE = re.compile(_NAME + r"\Z")
_ATOM_RE = re.compile(rf"\s*({_NAME})\s*\(([^()]*)\)\s*\Z")
_DECL_RE = re.compile(
    rf"\.decl\s+({_NAME})\s*/\s*(\d+)(?:\s+\.(edb|idb))?\s*\Z"
)

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self) -> str:
        return str(self.value)


Term = Var | Const


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> list[str]:
        return [t.name for t in self.args if isinstance(t, Var)]

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Atom, ...]

    def __str__(self) -> str:
        return f"{self.head} :- {', '.join(str(a) for a in self.body)}."


@dataclass(frozen=True)
class RelDecl:
    arity: int
    is_edb: bool


@dataclass
class Program:
    declarations: dict[str, RelDecl] = field(default_factory=dict)
    rules: tuple[Rule, ...] = ()

    def is_edb(self, name: str) -> bool:
        return self.declarations[name].is_edb

    def arity(self, name: str) -> int:
        return self.declarations[name].arity

    def idb_relations(self) -> list[str]:
        return [n for n, d in self.declarations.items() if not d.is_edb]

    def edb_relations(self) -> list[str]:
        return [n for n, d in self.declarations.items() if d.is_edb]

    def rules_for_head(self, name: str) -> list[int]:
        """Rule indices with this head, in textual order (union semantics)."""
        return [i for i, r in enumerate(self.rules) if r.head.relation == name]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return (
            self.declarations == other.declarations and self.rules == other.rules
        )


@dataclass(frozen=True)
class Stratum:
    relations: tuple[str, ...]
    seed_rules: tuple[int, ...]
    recursive_rules: tuple[int, ...]

    @property
    def is_recursive(self) -> bool:
        return bool(self.recursive_rules)


def _parse_term(text: str, line: int) -> Term:
    text = text.strip()
    if not text:
        raise ParseError("empty term", line)
    if text.isdigit():
        value = int(text)
        if value > _U64_MAX:
            raise ParseError(f"constant {text} exceeds 64 bits", line)
        return Const(value)
    if _NAME_RE.match(text):
        return Var(text)
    raise ParseError(f"bad term {text!r}", line)


def _parse_atom(text: str, line: int) -> Atom:
    m = _ATOM_RE.match(text)
    if not m:
        raise ParseError(f"bad atom {text.strip()!r}", line)
    name, argtext = m.group(1), m.group(2)
    if not argtext.strip():
        raise ParseError(f"atom {name} has no arguments", line)
    args = tuple(_parse_term(a, line) for a in argtext.split(","))
    return Atom(name, args)


def parse_program(text: str) -> Program:
    """Parse program text; raises ParseError, ArityMismatchError,
    UnsafeRuleError, EdbInHeadError."""
    decls: dict[str, RelDecl] = {}
    declared_flags: dict[str, bool | None] = {}
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stmt = raw.split("%", 1)[0].strip()
        if not stmt:
            continue
        if stmt.endswith("."):
            stmt = stmt[:-1].rstrip()
        if stmt.startswith(".decl"):
            m = _DECL_RE.match(stmt)
            if not m:
                raise ParseError(f"bad declaration {stmt!r}", lineno)
            name, arity, flag = m.group(1), int(m.group(2)), m.group(3)
            if name in decls:
                raise ParseError(f"duplicate declaration of {name}", lineno)
            decls[name] = RelDecl(arity, flag == "edb")
            declared_flags[name] = None if flag is None else (flag == "edb")
            continue
        if ":-" not in stmt:
            raise ParseError(
                f"malformed rule {stmt!r} (facts belong in .facts files)", lineno
            )
        head_text, body_text = stmt.split(":-", 1)
        head = _parse_atom(head_text, lineno)
        body_parts = _split_atoms(body_text, lineno)
        body = tuple(_parse_atom(p, lineno) for p in body_parts)
        if not body:
            raise ParseError("rule body is empty", lineno)
        body_vars = {v for a in body for v in a.variables()}
        for v in head.variables():
            if v not in body_vars:
                raise UnsafeRuleError(
                    f"line {lineno}: head variable {v} not bound in body of {head.relation}"
                )
        rules.append(Rule(head, body))

    # Arity checking and inference, first use wins when undeclared.
    arities: dict[str, int] = {n: d.arity for n, d in decls.items()}
    heads = {r.head.relation for r in rules}
    for rule in rules:
        for atom in (rule.head, *rule.body):
            seen = arities.get(atom.relation)
            if seen is None:
                arities[atom.relation] = atom.arity
            elif seen != atom.arity:
                raise ArityMismatchError(
                    f"{atom.relation} used with arity {atom.arity}, expected {seen}"
                )
    final: dict[str, RelDecl] = {}
    for name in arities:
        if name in decls and declared_flags.get(name) is not None:
            is_edb = decls[name].is_edb
            if is_edb and name in heads:
                raise EdbInHeadError(f"{name} declared .edb but appears in a head")
        else:
            is_edb = name not in heads
        final[name] = RelDecl(arities[name], is_edb)
    return Program(final, tuple(rules))


def _split_atoms(text: str, line: int) -> list[str]:
    """Split a body on commas that sit outside parentheses."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses", line)
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ParseError("unbalanced parentheses", line)
    tail = "".join(current)
    if tail.strip():
        parts.append(tail)
    return parts


def pretty_print(program: Program) -> str:
    """Canonical text form; parse_program(pretty_print(p)) == p."""
    lines = []
    for name, d in program.declarations.items():
        kind = ".edb" if d.is_edb else ".idb"
        lines.append(f".decl {name}/{d.arity} {kind}")
    for rule in program.rules:
        lines.append(str(rule))
    return "\n".join(lines) + "\n"


def build_dependency_graph(program: Program) -> dict[str, list[str]]:
    """Edge A -> B iff some rule has head B and A in its body."""
    graph: dict[str, set[str]] = {n: set() for n in program.declarations}
    for rule in program.rules:
        for atom in rule.body:
            graph[atom.relation].add(rule.head.relation)
    return {n: sorted(s) for n, s in sorted(graph.items())}


def _sccs(nodes: list[str], edges: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan strongly connected components, iterative, deterministic."""
    index_of: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0
    for root in nodes:
        if root in index_of:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index_of[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            succs = edges.get(node, [])
            while ei < len(succs):
                succ = succs[ei]
                ei += 1
                if succ not in index_of:
                    work.append((node, ei))
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index_of[succ])
            if advanced:
                continue
            if low[node] == index_of[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return sccs


def stratify(program: Program) -> list[Stratum]:
    """Strata = SCCs of the IDB-restricted dependency graph, topological order.

    A rule is recursive in its stratum when some body relation belongs to the
    same stratum; other rules deriving the stratum's relations are seeds.
    """
    idbs = [n for n in sorted(program.declarations) if not program.is_edb(n)]
    idb_set = set(idbs)
    edges: dict[str, list[str]] = {n: [] for n in idbs}
    for rule in program.rules:
        head = rule.head.relation
        for atom in rule.body:
            if atom.relation in idb_set and head in idb_set:
                if head not in edges[atom.relation]:
                    edges[atom.relation].append(head)
    for n in edges:
        edges[n].sort()
    comps = _sccs(idbs, edges)
    comp_of: dict[str, int] = {}
    for ci, comp in enumerate(comps):
        for n in comp:
            comp_of[n] = ci
    # Topological order over the condensation; Tarjan emits reverse-topological.
    order = list(range(len(comps)))
    # Verify and stabilize: repeatedly emit components with no unmet deps.
    deps: dict[int, set[int]] = {ci: set() for ci in order}
    for src, dsts in edges.items():
        for dst in dsts:
            a, b = comp_of[src], comp_of[dst]
            if a != b:
                deps[b].add(a)
    emitted: list[int] = []
    done: set[int] = set()
    remaining = sorted(deps, key=lambda ci: comps[ci])
    while remaining:
        ready = [ci for ci in remaining if deps[ci] <= done]
        if not ready:
            raise AssertionError("cyclic condensation")
        for ci in ready:
            emitted.append(ci)
            done.add(ci)
        remaining = [ci for ci in remaining if ci not in done]
    strata: list[Stratum] = []
    for ci in emitted:
        comp = comps[ci]
        comp_set = set(comp)
        seeds: list[int] = []
        recs: list[int] = []
        for ri, rule in enumerate(program.rules):
            if rule.head.relation not in comp_set:
                continue
            if any(a.relation in comp_set for a in rule.body):
                recs.append(ri)
            else:
                seeds.append(ri)
        strata.append(Stratum(tuple(comp), tuple(seeds), tuple(recs)))
    return strata
