from collections import Counter

import pytest

from oracles import find_sid, free_names, multiset_le, reaction, renamings
from sosieforge.minilang import BOOL, INT, STR, VOID, ListOf, free_variables, parse, pretty_print, scope_environments
from sosieforge.reactions import Reaction, ReactionIndex, compatible, count_candidates, extract_reaction
from sosieforge.runtime import coverage_of_suite
from sosieforge.transforms import candidate_transplants, eligible_points

BAR = """
fn bar(a: str, n: int) -> bool { return n > 0; }
fn f(varA: str, i: int) -> int {
    let flag: bool = false;
    flag = bar(varA, 10 + i);
    let x: int = i;
    return x + 1;
}
"""


@pytest.fixture(scope="module")
def bar_index():
    return ReactionIndex(parse(BAR))


def test_assignment_example(bar_index):
    program = bar_index.program
    sid = find_sid(program, "flag = bar(varA, 10 + i);")
    r = bar_index[sid]
    assert r.input_counts == Counter({STR: 1, INT: 1, BOOL: 1})
    assert r.output == VOID


def test_return_example(bar_index):
    r = bar_index[find_sid(bar_index.program, "return x + 1;")]
    assert r == Reaction.of([INT], INT)


def test_let_does_not_count_its_own_name(bar_index):
    program = bar_index.program
    assert bar_index[find_sid(program, "let x: int = i;")] == Reaction.of([INT], VOID)
    assert bar_index[find_sid(program, "let flag: bool = false;")] == Reaction.of([], VOID)


def test_multiplicity_counts_distinct_names(make):
    program = make("fn f(a: int, b: int) { a = a + b * b; }")
    assert ReactionIndex(program)[0].input_counts == Counter({INT: 2})


def test_compound_statement_excludes_inner_declarations(make):
    program = make("fn f(n: int) -> int { while n > 0 { let d: str = \"x\"; n = n - 1; } return n; }")
    env = scope_environments(program)[0]
    assert extract_reaction(program.stmt(0), env, INT) == Reaction.of([INT], VOID)


def test_output_only_for_returning_statements(make):
    program = make("fn f(c: bool) -> int { if c { return 1; } else { return 2; } }")
    assert ReactionIndex(program)[0].output == INT
    program = make("fn f(c: bool) -> int { if c { return 1; } return 2; }")
    assert ReactionIndex(program)[0].output == VOID


def test_index_is_total(corpus_programs):
    for program in corpus_programs.values():
        assert sorted(ReactionIndex(program).reactions) == list(range(len(program.statements)))


@pytest.mark.parametrize("name", ["demo", "textkit", "listalgo"])
def test_reactions_match_brute_force(corpus_programs, name):
    program = corpus_programs[name]
    index = ReactionIndex(program)
    envs = scope_environments(program)
    for info in program.statements:
        assert set(free_variables(info.stmt)) == free_names(info.stmt)
        inputs, output = reaction(program, envs, info.sid)
        assert index[info.sid].input_counts == inputs
        assert index[info.sid].output == output


def test_compatible_examples():
    assert compatible(Reaction.of([INT], VOID), Reaction.of([INT, INT, BOOL], VOID))
    assert not compatible(Reaction.of([STR], VOID), Reaction.of([INT], VOID))
    assert not compatible(Reaction.of([INT, INT], VOID), Reaction.of([INT, BOOL], VOID))
    assert not compatible(Reaction.of([], INT), Reaction.of([INT], VOID))
    assert compatible(Reaction.of([ListOf(INT)], INT), Reaction.of([ListOf(INT), INT], INT))


def test_compatibility_matches_multiset_oracle(demo):
    index = ReactionIndex(demo)
    envs = scope_environments(demo)
    mine = {sid: reaction(demo, envs, sid) for sid in range(len(demo.statements))}
    for p in mine:
        for t in mine:
            expected = mine[t][1] == mine[p][1] and multiset_le(mine[t][0], mine[p][0])
            assert compatible(index[t], index[p]) == expected, (t, p)
        assert index.compatible_with(p) == [t for t in demo.app_sids
                                            if mine[t][1] == mine[p][1] and multiset_le(mine[t][0], mine[p][0])]


def test_reactions_survive_round_trip(corpus_programs):
    program = corpus_programs["listalgo"]
    again = parse(pretty_print(program))
    assert ReactionIndex(program).reactions == ReactionIndex(again).reactions


def test_dump_lines(bar_index):
    import json

    rows = [json.loads(line) for line in bar_index.dump().splitlines()]
    assert len(rows) == len(bar_index)
    assert rows[2] == {"stmt_id": 2, "input": ["bool", "int", "str"], "output": "void"}


# -- candidate counts --------------------------------------------------------------

COUNTING = """
fn f(x: int, y: int, z: int, s: str) -> int {
    x = x + y + z;
    let a: int = 0;
    a = x;
    s = concat(s, "!");
    y = x * y;
    z = 1;
    x = a;
    if x > y { x = y; }
    z = x + y;
    return x;
}
fn test_f() { assert(f(1, 2, 3, "s") > 0); }
"""


@pytest.fixture(scope="module")
def counting():
    program = parse(COUNTING)
    return program, ReactionIndex(program)


def test_delete_counts_points(counting):
    program, index = counting
    assert count_candidates("delete", [0, 2, 3, 4, 5], index, program) == 5


def test_random_counts_points_times_statements(counting):
    program, index = counting
    assert len(program.app_sids) == 11
    assert count_candidates("add_random", [0, 1, 2], index, program) == 33
    assert count_candidates("replace_random", [0, 1, 2], index, program) == 33


def test_random_formula_on_ten_statements(make):
    program = make("fn f(a: int) -> int { " + "a = a + 1; " * 9 + "return a; }")
    assert len(program.app_sids) == 10
    assert count_candidates("add_random", [0, 1, 2], ReactionIndex(program), program) == 30


def test_steroid_mapping_count(counting):
    program, index = counting
    # transplant x = x + y + z (three ints) at point z = x + y (three int names)
    point = find_sid(program, "z = x + y;")
    transplant = find_sid(program, "x = x + y + z;")
    assert index.mapping_count(point, transplant) == 27
    # two int names at a point with three: 3 x 3
    two = find_sid(program, "y = x * y;")
    assert index.mapping_count(point, two) == 9
    envs = scope_environments(program)
    assert len(renamings(program, envs, point, two)) == 9


def test_count_properties(corpus_programs):
    program = corpus_programs["demo"]
    index = ReactionIndex(program)
    points = eligible_points(program, coverage_of_suite(program), index)
    assert count_candidates("add_steroid", points, index) >= count_candidates("add_reaction", points, index)
    for p in points:
        for family in ("add", "replace"):
            rand = set(candidate_transplants(f"{family}_random", p, program, index))
            assert set(candidate_transplants(f"{family}_wittgenstein", p, program, index)) <= rand
            assert set(candidate_transplants(f"{family}_reaction", p, program, index)) <= rand
