import pytest
from hypothesis import given, strategies as st

from audel.frames import AgentUpdateFrame
from audel.model import KripkeModel, compose_world
from audel.semantics import (
    EvalContext, UnresolvedFrame, check_validity_on, extension, model_check, satisfying_worlds,
)
from audel.syntax import BOT, TOP, DiamondUnion, DiamondUpdate, Not, atom, parse_formula
from audel.testkit import GenConfig, gen_formula, gen_frames, gen_model
from audel.update import sum_product_update

from conftest import dorm
from oracles import MatModel, holds

seeds = st.integers(0, 2**32 - 1)


def _random_instance(seed, language="DEL"):
    cfg = GenConfig(seed=seed)
    ctx = EvalContext()
    import random

    rng = random.Random(seed)
    gen_frames(cfg, ctx, rng)
    m = gen_model(cfg, rng)
    f = gen_formula(cfg, language, ctx, rng)
    return m, f, ctx


def test_initial_gruffalo(m0):
    assert model_check(m0, "s", parse_formula("P[m] true & P[f] true & P[o] true & ~P[g] true"))


def test_top_everywhere(m0):
    assert model_check(m0, "s", TOP)
    assert check_validity_on(m0, TOP)


def test_first_gruffalo_update(m0, gruffalo_ctx):
    f = parse_formula("<U1@u1>(~P[g] true & P[f] P[g] true & B[m] B[f] P[g] true & ~P[o] P[g] true)")
    assert model_check(m0, "s", f, gruffalo_ctx)


def test_union_with_failing_member():
    m = KripkeModel({"s", "t"}, {"a": {("s", "t")}}, {"p": {"t"}})
    U = AgentUpdateFrame(["u"], pre={"u": BOT}, name="U")
    V = AgentUpdateFrame(["v"], obs={"a": {("v", "v")}}, name="V")
    ctx = EvalContext({"U": U, "V": V})
    body = parse_formula("P[a] p")
    union = DiamondUnion((("U", "u"), ("V", "v")), body)
    for s in m.worlds:
        assert model_check(m, s, union, ctx) == model_check(m, s, DiamondUpdate("V", "v", body), ctx)


def test_four_axiom_valid_on_transitive_models():
    f = parse_formula("B[a] p -> B[a] B[a] p")
    for seed in range(50):
        assert check_validity_on(gen_model(GenConfig(seed=seed)), f)


def test_negative_introspection_fails_after_no_guard():
    m, U = dorm("noguard")
    res = sum_product_update(m, U).model
    assert not check_validity_on(res, parse_formula("~B[i] p -> B[i] ~B[i] p"))


def test_unresolved_frame():
    m = KripkeModel({"s"}, {}, {})
    with pytest.raises(UnresolvedFrame):
        model_check(m, "s", parse_formula("<X@u> true"))


def test_lazy_frame_directory(m0, gruffalo_ctx):
    assert satisfying_worlds(m0, parse_formula("<U1@u1> true"), gruffalo_ctx) == ["s"]
    assert "U1" in gruffalo_ctx.frames


@given(seeds)
def test_agrees_with_pointwise_oracle(seed):
    m, f, ctx = _random_instance(seed)
    ref = MatModel.of(m)
    for s in m.worlds:
        assert model_check(m, s, f, ctx) == holds(ref, s, f, ctx.frames)


@given(seeds)
def test_update_clause(seed):
    m, f, ctx = _random_instance(seed)
    name = sorted(ctx.frames)[0]
    U = ctx.frames[name]
    u = U.events[-1]
    res = sum_product_update(m, U).model
    for s in m.worlds:
        rhs = model_check(m, s, U.precondition(u)) and model_check(res, compose_world(s, u), f, ctx)
        assert model_check(m, s, DiamondUpdate(name, u, f), ctx) == rhs


@given(seeds)
def test_negation_complete(seed):
    m, f, ctx = _random_instance(seed)
    assert extension(m, f, ctx) | extension(m, Not(f), ctx) == m.worlds
    assert not extension(m, f, ctx) & extension(m, Not(f), ctx)


@given(seeds)
def test_memo_transparent(seed):
    m, f, ctx = _random_instance(seed)
    plain = EvalContext(ctx.frames, memo=False)
    assert extension(m, f, ctx) == extension(m, f, plain)


@given(seeds)
def test_singleton_union(seed):
    m, f, ctx = _random_instance(seed, "EL")
    name = sorted(ctx.frames)[0]
    u = ctx.frames[name].events[0]
    one = DiamondUnion(((name, u),), f)
    assert extension(m, one, ctx) == extension(m, DiamondUpdate(name, u, f), ctx)
