import pytest

from audel.frames import AgentUpdateFrame, load_frame
from audel.proofkit import (
    SCHEMAS, TAUTOLOGIES, MissingBinding, SideConditionError, instantiate_axiom,
    instantiate_rule, normalize_schema, run_trial, soundness_suite, trial_seeds,
)
from audel.semantics import EvalContext, check_validity_on, extension
from audel.syntax import BOT, And, DiamondUpdate, Iff, atom, parse_formula, print_formula
from audel.testkit import GenConfig, gen_model

from conftest import DATA

P = atom("p")


def _warden_ctx():
    return EvalContext({"W": load_frame(DATA / "dorm" / "warden.json", "W")})


def test_axiom_three_text():
    assert print_formula(instantiate_axiom(3, {"phi": P, "a": "i"})) == "(B[i] p -> B[i] B[i] p)"


def test_axiom_five_unchanged_fluent():
    U = AgentUpdateFrame(["u"], pre={"u": atom("q")}, name="U")
    f = instantiate_axiom(5, {"frame": "U", "event": "u", "p": P}, EvalContext({"U": U}))
    assert f == Iff(DiamondUpdate("U", "u", P), And(atom("q"), P))


def test_axiom_five_cleared_fluent():
    U = AgentUpdateFrame(["u"], post={"u": {"p": False}}, name="U")
    f = instantiate_axiom(5, {"frame": "U", "event": "u", "p": P}, EvalContext({"U": U}))
    assert f == Iff(DiamondUpdate("U", "u", P), BOT)


def test_axiom_nine_warden():
    ctx = _warden_ctx()
    f = instantiate_axiom(9, {"phi": P, "a": "i", "frame": "W", "event": "u"}, ctx)
    rhs = "(true & (((<W@u> p | P[a] <W@u> p) | P[r1] <W@u> p) | P[r2] <W@u> p))"
    assert print_formula(f) == f"((<W@u> P[i] p -> {rhs}) & ({rhs} -> <W@u> P[i] p))"
    m = __import__("audel.model", fromlist=["load_model"]).load_model(DATA / "dorm" / "warden_model.json")
    assert check_validity_on(m, f, ctx)


def test_side_conditions():
    ctx = _warden_ctx()
    with pytest.raises(SideConditionError):
        instantiate_axiom(8, {"phi": P, "a": "i", "frame": "W", "event": "u"}, ctx)
    with pytest.raises(SideConditionError):
        instantiate_axiom(9, {"phi": P, "a": "a", "frame": "W", "event": "u"}, ctx)


def test_missing_binding():
    with pytest.raises(MissingBinding):
        instantiate_axiom(2, {"phi": P, "a": "i"})
    with pytest.raises(ValueError):
        instantiate_axiom(6, {"phi": P, "frame": "W", "event": "u"})


def test_rules():
    prem, concl = instantiate_rule("NEC-B", {"phi": P, "a": "i"})
    assert prem == [P] and print_formula(concl) == "B[i] p"
    prem, concl = instantiate_rule("MP", {"phi": P, "psi": atom("q")})
    assert concl == atom("q") and len(prem) == 2
    assert normalize_schema(10) == "MP" and normalize_schema("12") == "NEC-U"
    assert print_formula(instantiate_axiom(12, {"phi": P, "frame": "W", "event": "u"})) == "[W@u] p"


def test_schema_catalogue():
    assert len([s for s in SCHEMAS if s != "DIST-IFF"]) == 13
    assert {"peirce", "K"} <= set(TAUTOLOGIES)


def test_union_axiom_with_failing_precondition():
    ctx = EvalContext({"U": AgentUpdateFrame(["u"], pre={"u": BOT}, name="U"),
                       "V": AgentUpdateFrame(["v"], obs={"a": {("v", "v")}}, name="V")})
    f = instantiate_axiom(13, {"phi": parse_formula("P[a] p"), "pointed": [("U", "u"), ("V", "v")]}, ctx)
    for seed in range(30):
        m = gen_model(GenConfig(seed=seed))
        assert check_validity_on(m, f, ctx)


@pytest.mark.parametrize("schema", [1, "DIST-IFF", 2, 3, 4, 5, 6, 7, 13, "MP", "NEC-B", "NEC-U"])
def test_schema_sound_on_random_models(schema):
    report = soundness_suite(150, seed=1, schemas=[schema])
    assert report["failed_trials"] == 0, report["failures"][:1]


def test_report_is_reproducible():
    a = soundness_suite(40, seed=9)
    b = soundness_suite(40, seed=9)
    a.pop("elapsed_s"), b.pop("elapsed_s")
    assert a == b
    assert trial_seeds(9, 3) == trial_seeds(9, 3) != trial_seeds(10, 3)


def test_parallel_matches_serial():
    a = soundness_suite(28, seed=4, workers=2)
    b = soundness_suite(28, seed=4)
    a.pop("elapsed_s"), b.pop("elapsed_s")
    assert a == b


@pytest.mark.xfail(strict=True, reason="belief rewrite for non-added agents ignores arrows created by the transitive closure")
def test_axiom_eight_with_deletes():
    report = soundness_suite(2000, seed=3, cfg=GenConfig(del_prob=0.5, edge_prob=0.5), schemas=[8])
    assert report["failed_trials"] == 0


def test_reported_failures_reproduce():
    report = soundness_suite(2000, seed=1, schemas=[8, 9])
    assert report["failed_trials"] > 0
    seeds = trial_seeds(1, 2000)
    for fail in report["failures"][:5]:
        i = fail["trial"]
        again = run_trial(i, fail["schema"], seeds[i], GenConfig())
        assert again.falsifying_worlds == fail["worlds"]
