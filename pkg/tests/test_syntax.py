import pytest
from hypothesis import given, strategies as st

from audel.frames import AgentUpdateFrame
from audel.semantics import EvalContext
from audel.syntax import (
    BOT, TOP, And, Atom, DiamondUnion, DiamondUpdate, FormulaSyntaxError, Not, Possible,
    SignatureError, atom, check_signature, formula_length, is_del, is_del_minus, is_el,
    modal_depth, parse_formula, print_formula, union_update,
)
from audel.testkit import GenConfig, gen_formula

P = Atom("p")


def test_negated_possibility():
    assert parse_formula("~P[g] true") == Not(Possible("g", TOP))


def test_belief_sugar_expands():
    # B[i] x is ~P[i] ~x
    got = parse_formula("B[m] B[f] P[g] true")
    assert got == Not(Possible("m", Not(Not(Possible("f", Not(Possible("g", TOP)))))))


def test_union_parses():
    f = parse_formula("<U1@u1 + U2@u2> p(f)")
    assert f == DiamondUnion((("U1", "u1"), ("U2", "u2")), Atom("p", ("f",)))


def test_singleton_union_normalizes():
    assert union_update([("U", "u")], P) == DiamondUpdate("U", "u", P)
    assert parse_formula("<U@u> p") == DiamondUpdate("U", "u", P)


@pytest.mark.parametrize("f, text", [
    (TOP, "true"),
    (Possible("i", P), "P[i] p"),
    (And(TOP, TOP), "(true & true)"),
    (BOT, "false"),
])
def test_print(f, text):
    assert print_formula(f) == text


def test_precedence():
    assert parse_formula("p & q | r") == parse_formula("(p & q) | r")
    assert parse_formula("p -> q -> r") == parse_formula("p -> (q -> r)")
    assert parse_formula("~p & q") == And(Not(P), Atom("q"))
    assert parse_formula("[U@u] p") == Not(DiamondUpdate("U", "u", Not(P)))


@pytest.mark.parametrize("text, pos", [("p &", 3), ("P[i p", 4), ("p ) q", 2), ("", 0)])
def test_syntax_error_has_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text)
    assert info.value.pos == pos


def test_arity_checked_against_signature():
    check_signature(parse_formula("p(f,o,g) & q"), {"p": 3, "q": 0})
    with pytest.raises(SignatureError):
        parse_formula("p(f) & q", {"p": 3, "q": 0})
    with pytest.raises(SignatureError):
        check_signature(parse_formula("r"), {"p": 0})


def test_formula_length():
    assert formula_length(TOP) == 1
    assert formula_length(Not(TOP)) == 2
    U = AgentUpdateFrame(["u", "v"], obs={"a": {("u", "v")}}, add={"b": {("v", "v")}},
                         pre={"v": P}, post={"u": {"q": True}}, name="U")
    # 2 events, 2 agents, 3*2*2^2 capacity, pre sizes 1 (true) + 1 (p), one post entry
    assert U.size() == 2 + 2 + 24 + 2 + 1
    assert formula_length(DiamondUpdate("U", "u", TOP), {"U": U}) == 2 + U.size()
    with pytest.raises(KeyError):
        formula_length(DiamondUpdate("X", "u", TOP), {})


def test_modal_depth():
    assert modal_depth(P) == 0
    assert modal_depth(Possible("i", Possible("j", TOP))) == 2
    assert modal_depth(DiamondUpdate("U", "u", Possible("i", TOP))) == 2


def test_atom_helper():
    assert atom("p(f,o,g)") == Atom("p", ("f", "o", "g"))
    assert atom("p(f,o,g)").key == "p(f,o,g)"


formulas = st.builds(
    lambda seed, lang: (gen_formula(GenConfig(seed=seed), lang, EvalContext()), lang),
    st.integers(0, 2**32 - 1), st.sampled_from(["EL", "DEL-", "DEL"]),
)


@given(formulas)
def test_round_trip(fl):
    f, _ = fl
    assert parse_formula(print_formula(f)) == f


@given(formulas)
def test_printing_is_stable(fl):
    f, _ = fl
    once = print_formula(parse_formula(print_formula(f)))
    assert print_formula(parse_formula(once)) == once


@given(formulas)
def test_language_classification(fl):
    f, lang = fl
    assert {"EL": is_el, "DEL-": is_del_minus, "DEL": is_del}[lang](f)
    if is_el(f):
        assert is_del_minus(f)
    if is_del_minus(f):
        assert is_del(f)
