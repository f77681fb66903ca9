import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import count_statements
from sosieforge.corpus import BUNDLED, source_files
from sosieforge.minilang import (
    BOOL,
    INT,
    STR,
    VOID,
    ListOf,
    MiniLangError,
    enumerate_statements,
    parse,
    parse_type,
    pretty_print,
    typecheck,
)
from sosieforge.minilang import syntax as S
from sosieforge.minilang.diagnostics import NAME_ERROR, PARSE_ERROR, RETURN_PATH_ERROR, TYPE_ERROR

CORPUS_FILES = [p for name in BUNDLED for p in source_files(name)]


def kinds(diags):
    return [d.kind for d in diags]


# -- types -------------------------------------------------------------------


def test_list_of_void_rejected():
    with pytest.raises(ValueError):
        ListOf(VOID)


def test_types_compare_structurally():
    assert ListOf(ListOf(INT)) == parse_type("[[int]]")
    assert ListOf(INT) != ListOf(STR)
    assert {ListOf(BOOL): 1}[parse_type("[bool]")] == 1


# -- parse ---------------------------------------------------------------------


def test_minimal_program():
    tree = parse("fn main() -> int { return 1; }")
    assert len(tree.functions) == 1
    assert len(tree.statements) == 1
    assert typecheck(tree) == []


def test_malformed_input_is_a_parse_error():
    diags = parse("fn f( {")
    assert isinstance(diags, list)
    assert kinds(diags) == [PARSE_ERROR]
    assert diags[0].offset == 6


def test_parse_error_offsets_are_bytes():
    diags = parse('fn f() { let s: str = "é"; ?? }')
    assert kinds(diags) == [PARSE_ERROR]
    assert diags[0].offset == len('fn f() { let s: str = "é"; '.encode())


@pytest.mark.parametrize("source", ["", "fn", "fn f() { let x: int = ; }", 'fn f() { print("a\\q"); }',
                                    "fn f() { x = 1 }", "fn f() -> void {}"])
def test_garbage_never_raises(source):
    result = parse(source)
    assert isinstance(result, (list, S.Program))


# -- typecheck --------------------------------------------------------------------


def test_missing_return():
    assert kinds(typecheck(parse("fn f() -> int { }"))) == [RETURN_PATH_ERROR]


def test_let_type_mismatch_names_the_statement():
    diags = typecheck(parse("fn f() -> int { let x: bool = 1; return 0; }"))
    assert kinds(diags) == [TYPE_ERROR]
    assert diags[0].sid == 0 and diags[0].function == "f"


@pytest.mark.parametrize("source,kind", [
    ("fn f() { y = 1; }", NAME_ERROR),
    ("fn f() { let x: int = 1; let x: int = 2; }", NAME_ERROR),
    ("fn f(x: int) { if true { let x: int = 2; } }", NAME_ERROR),
    ("fn f() { 1 + 2; }", TYPE_ERROR),
    ("fn f() { let x: int = g(); }", NAME_ERROR),
    ("fn f() -> int { while true { return 1; } }", RETURN_PATH_ERROR),
    ("fn f() -> int { if true { return 1; } }", RETURN_PATH_ERROR),
    ("fn test_a() {} fn f() { test_a(); }", TYPE_ERROR),
    ("fn test_a(x: int) {}", TYPE_ERROR),
    ("fn f() { let xs: [int] = []; let y: str = xs[0]; }", TYPE_ERROR),
    ("fn f() { let b: bool = 1 < true; }", TYPE_ERROR),
    ("fn len() {}", NAME_ERROR),
    ("fn f() {} fn f() {}", NAME_ERROR),
    ("fn f() { let x: int = x; }", NAME_ERROR),
])
def test_typecheck_rejects(source, kind):
    assert kind in kinds(typecheck(parse(source)))


def test_definite_return_rules():
    ok = """
    fn a(x: int) -> int { if x > 0 { return 1; } else { return 2; } }
    fn b() -> int { { return 1; } }
    fn c() -> int { while true { } return 0; }
    """
    assert typecheck(parse(ok)) == []


def test_sibling_scopes_may_reuse_names():
    src = "fn f() { if true { let t: int = 1; } else { let t: int = 2; } let t: int = 3; }"
    assert typecheck(parse(src)) == []


def test_empty_lists_typed_from_context():
    src = "fn f() -> bool { let xs: [[int]] = [[], [1]]; return xs == [] || push([], 1) == [1]; }"
    assert typecheck(parse(src)) == []


def test_diagnostics_are_deterministic():
    src = "fn f() -> int { let x: bool = 1; y = 2; }"
    first = [d.to_json() for d in typecheck(parse(src))]
    assert first == [d.to_json() for d in typecheck(parse(src))]
    assert len(first) == 3


def test_load_raises_with_diagnostics(make):
    with pytest.raises(MiniLangError) as info:
        make("fn f() -> int { }")
    assert kinds(info.value.diagnostics) == [RETURN_PATH_ERROR]


def test_every_corpus_program_typechecks(corpus_programs):
    for program in corpus_programs.values():
        assert typecheck(program) == []


# -- printing ------------------------------------------------------------------------


def test_empty_function_body_shape():
    assert pretty_print(parse("fn f() -> int {}")) == "fn f() -> int {\n}\n"


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: f"{p.parent.parent.name}/{p.name}")
def test_corpus_round_trip(path):
    tree = parse(path.read_text(encoding="utf-8"))
    printed = pretty_print(tree)
    again = parse(printed)
    assert again == tree
    assert pretty_print(again) == printed
    assert typecheck(again) == typecheck(tree)


def test_printing_is_injective_on_corpus():
    trees = [parse(p.read_text(encoding="utf-8")) for p in CORPUS_FILES]
    for a, b in itertools.combinations(trees, 2):
        assert a != b
        assert pretty_print(a) != pretty_print(b)


def test_precedence_is_preserved():
    src = "fn f() -> int { return (1 - 2) - (3 - 4) * -(5 % 2); }"
    tree = parse(src)
    assert "1 - 2 - (3 - 4) * -(5 % 2)" in pretty_print(tree)
    assert parse(pretty_print(tree)) == tree


# -- statements --------------------------------------------------------------------


def test_single_statement_listing():
    assert enumerate_statements(parse("fn main() -> int { return 1; }")) == [(0, "return", "main")]


def test_if_else_pre_order():
    tree = parse("fn f(c: bool) { if c { print(\"a\"); } else { { print(\"b\"); } } print(\"c\"); }")
    assert [k for _, k, _ in enumerate_statements(tree)] == ["if", "expr", "block", "expr", "expr"]


def test_enumeration_is_stable(corpus_programs):
    program = corpus_programs["textkit"]
    assert enumerate_statements(program) == enumerate_statements(parse(pretty_print(program)))


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: f"{p.parent.parent.name}/{p.name}")
def test_statement_count_matches_independent_counter(path):
    tree = parse(path.read_text(encoding="utf-8"))
    assert len(enumerate_statements(tree)) == count_statements(tree)


# -- generated programs -------------------------------------------------------------------

NAMES = st.sampled_from(["a", "b", "xs", "total", "i_2"])
STRINGS = st.text(alphabet='ab "\\\n\t;=', max_size=6)


def exprs():
    leaves = st.one_of(
        st.integers(0, 2**40).map(S.IntLit),
        st.booleans().map(S.BoolLit),
        STRINGS.map(S.StrLit),
        NAMES.map(S.VarRef),
    )
    ops = ["||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%", "[]"]

    def extend(inner):
        return st.one_of(
            st.tuples(st.sampled_from(ops), inner, inner).map(lambda t: S.Binary(*t)),
            st.tuples(st.sampled_from(["-", "!"]), inner).map(lambda t: S.Unary(*t)),
            st.lists(inner, max_size=3).map(lambda xs: S.ListLit(tuple(xs))),
            st.tuples(st.sampled_from(["helper", "g"]), st.lists(inner, max_size=2)).map(
                lambda t: S.Call(t[0], tuple(t[1]))),
            st.tuples(st.sampled_from(["len", "push", "print"]), st.lists(inner, max_size=2)).map(
                lambda t: S.Builtin(t[0], tuple(t[1]))),
        )

    return st.recursive(leaves, extend, max_leaves=8)


TYPES = st.recursive(st.sampled_from([INT, BOOL, STR]), lambda inner: inner.map(ListOf), max_leaves=3)


def stmts():
    simple = st.one_of(
        st.tuples(NAMES, TYPES, exprs()).map(lambda t: S.LetDecl(*t)),
        st.tuples(NAMES, exprs()).map(lambda t: S.Assign(*t)),
        exprs().map(S.ExprStmt),
        st.one_of(st.none(), exprs()).map(S.Return),
    )

    def extend(inner):
        body = st.lists(inner, max_size=3).map(tuple)
        return st.one_of(
            st.tuples(exprs(), body, st.one_of(st.none(), body)).map(lambda t: S.If(*t)),
            st.tuples(exprs(), body).map(lambda t: S.While(*t)),
            body.map(S.Block),
        )

    return st.recursive(simple, extend, max_leaves=6)


programs = st.lists(
    st.tuples(
        st.sampled_from(["f", "helper", "test_x"]),
        st.lists(st.tuples(NAMES, TYPES).map(lambda t: S.Param(*t)), max_size=2),
        st.one_of(st.just(VOID), TYPES),
        st.lists(stmts(), max_size=4),
    ).map(lambda t: S.Function(t[0], tuple(t[1]), t[2], tuple(t[3]))),
    min_size=1, max_size=3,
).map(lambda fns: S.Program(tuple(fns)))


@settings(max_examples=200, deadline=None)
@given(programs)
def test_generated_round_trip(tree):
    printed = pretty_print(tree)
    again = parse(printed)
    assert again == tree, printed
    # typecheck must not depend on formatting
    assert [d.to_json() for d in typecheck(again)] == [d.to_json() for d in typecheck(tree)]
    assert len(enumerate_statements(tree)) == count_statements(tree)
