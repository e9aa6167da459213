import pytest

from flexdl.errors import (
    ArityMismatchError,
    EdbInHeadError,
    ParseError,
    UnsafeRuleError,
)
from flexdl.frontend import (
    Atom,
    Const,
    Var,
    parse_program,
    pretty_print,
    stratify,
)

TC = """\
.decl edge/2 .edb
.decl path/2 .idb
path(x, y) :- edge(x, y).
path(x, z) :- path(x, y), edge(y, z).
"""


def test_parse_declarations():
    p = parse_program(TC)
    assert p.arity("edge") == 2
    assert p.arity("path") == 2
    assert p.is_edb("edge")
    assert not p.is_edb("path")
    assert len(p.rules) == 2


def test_comments_and_optional_period():
    p = parse_program("""
% a comment line
.decl e/2 .edb   % trailing comment
.decl t/2
t(x, y) :- e(x, y)
""")
    assert p.arity("e") == 2
    assert len(p.rules) == 1


def test_flag_inference_head_means_idb():
    p = parse_program("""
.decl e/2
.decl t/2
t(x, y) :- e(x, y).
""")
    assert p.is_edb("e")
    assert not p.is_edb("t")


def test_undeclared_relations_inferred_from_use():
    p = parse_program("t(x, y) :- e(x, y), f(y, z).")
    assert p.arity("t") == 2
    assert p.arity("f") == 2
    assert p.is_edb("e") and p.is_edb("f")
    assert not p.is_edb("t")


def test_constants_parse_as_filters():
    p = parse_program("t(x) :- e(x, 7).")
    atom = p.rules[0].body[0]
    assert atom.args == (Var("x"), Const(7))


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_program(".decl broken")
    with pytest.raises(ParseError):
        parse_program(".decl e/2\n.decl e/2")
    with pytest.raises(ParseError):
        parse_program("just a fact(1, 2).")
    with pytest.raises(ParseError):
        parse_program("t(x) :- e(x, 99999999999999999999999).")
    with pytest.raises(ParseError):
        parse_program("t(x) :- .")


def test_arity_mismatch():
    with pytest.raises(ArityMismatchError):
        parse_program("t(x, y) :- e(x, y), e(x).")
    with pytest.raises(ArityMismatchError):
        parse_program(".decl e/3\nt(x, y) :- e(x, y).")


def test_unsafe_rule_rejected():
    with pytest.raises(UnsafeRuleError):
        parse_program("t(x, z) :- e(x, y).")


def test_edb_in_head_rejected():
    with pytest.raises(EdbInHeadError):
        parse_program(".decl e/2 .edb\ne(x, y) :- e(y, x).")


def test_parse_error_carries_line_number():
    try:
        parse_program(".decl e/2 .edb\n\nbad line here")
    except ParseError as e:
        assert e.line == 3
    else:
        pytest.fail("expected ParseError")


def test_pretty_print_round_trip():
    p = parse_program(TC)
    assert parse_program(pretty_print(p)) == p


def test_stratify_tc():
    p = parse_program(TC)
    strata = stratify(p)
    rec = [s for s in strata if s.is_recursive]
    assert len(rec) == 1
    assert rec[0].relations == ("path",)
    assert rec[0].seed_rules == (0,)
    assert rec[0].recursive_rules == (1,)


def test_stratify_orders_dependencies():
    p = parse_program("""
.decl e/2 .edb
.decl t/2 .idb
.decl u/2 .idb
u(x, y) :- t(x, y), e(x, y).
t(x, y) :- e(x, y).
t(x, z) :- t(x, y), e(y, z).
""")
    strata = stratify(p)
    order = [s.relations for s in strata]
    assert order.index(("t",)) < order.index(("u",))
    u_stratum = strata[order.index(("u",))]
    assert not u_stratum.is_recursive


def test_stratify_mutual_recursion_single_stratum():
    p = parse_program("""
.decl e/2 .edb
.decl a/2 .idb
.decl b/2 .idb
a(x, y) :- e(x, y).
a(x, z) :- b(x, y), e(y, z).
b(x, y) :- a(x, y).
""")
    strata = stratify(p)
    rec = [s for s in strata if s.is_recursive]
    assert len(rec) == 1
    assert sorted(rec[0].relations) == ["a", "b"]


def test_nonrecursive_program_has_no_recursive_stratum():
    p = parse_program("t(x, y) :- e(x, y).")
    assert all(not s.is_recursive for s in stratify(p))
