import pytest
from hypothesis import given, strategies as st

from audel.frames import (
    AgentUpdateFrame, FrameError, add_set, del_set, frame_from_dict, frame_to_dict, load_frame,
    load_frame_dir, observers, validate_frame,
)
from audel.syntax import DiamondUpdate, TOP, atom
from audel.testkit import GenConfig, gen_frame

from conftest import DATA

SKIP = AgentUpdateFrame(["u"], obs={"a": {("u", "u")}})


def test_skip_frame_is_valid():
    assert validate_frame(SKIP) == []
    assert add_set(SKIP, "u") == del_set(SKIP, "u") == frozenset()


def test_non_el_precondition():
    U = AgentUpdateFrame(["u"], pre={"u": DiamondUpdate("V", "v", TOP)})
    assert [v.kind for v in validate_frame(U)] == ["non-EL-precondition"]


def test_dangling_event():
    U = AgentUpdateFrame(["u"], obs={"a": {("u", "x")}})
    assert [v.kind for v in validate_frame(U)] == ["dangling-event"]


def test_signature_violation():
    U = AgentUpdateFrame(["u"], pre={"u": atom("p(f)")}, post={"u": {"q": True}})
    kinds = [v.kind for v in validate_frame(U, {"p": 2, "q": 0})]
    assert kinds == ["signature"]


def test_unknown_event_raises():
    with pytest.raises(FrameError):
        add_set(SKIP, "nope")
    with pytest.raises(FrameError):
        observers(SKIP, "nope")


def test_warden_sets():
    U = load_frame(DATA / "dorm" / "warden.json")
    assert add_set(U, "u") == {"i"}
    assert observers(U, "u") == {"r1", "r2", "a"}


def test_deception_frame():
    U = load_frame(DATA / "gruffalo" / "deception.json")
    assert add_set(U, "v") == {"g"}
    assert "m" in observers(U, "u") and "f" not in observers(U, "u")
    assert U.postcondition("v", "eats(g,f)") is True


def test_john_removal():
    U = load_frame(DATA / "dorm" / "john.json")
    assert del_set(U, "u") == {"John"}


def test_delete_to_other_target_counts():
    U = AgentUpdateFrame(["u", "v"], delete={"i": {("u", "v")}})
    assert del_set(U, "u") == {"i"} and del_set(U, "v") == frozenset()


def test_tom_observers_after_group_expansion():
    U = load_frame(DATA / "dorm" / "tom.json")
    assert observers(U, "u") == {"r1", "i", "a"}


def test_no_self_loops_no_observers():
    U = AgentUpdateFrame(["u", "v"], obs={"a": {("u", "v")}, "b": {("u", "u"), ("u", "v")}})
    assert observers(U, "u") == frozenset()


def test_every_bundled_frame_validates():
    frames = {}
    for sub in ("gruffalo", "dorm", "deception"):
        frames.update(load_frame_dir(DATA / sub))
    assert len(frames) == 12
    for name, U in frames.items():
        assert validate_frame(U) == [], name


def test_bad_post_value():
    with pytest.raises(FrameError):
        frame_from_dict({"events": ["u"], "post": {"u": {"p": "maybe"}}})


def test_post_no_is_dropped():
    U = frame_from_dict({"events": ["u"], "post": {"u": {"p": "no", "q": "false"}}})
    assert U.postcondition("u", "p") is None and U.postcondition("u", "q") is False


def test_size_of_skip():
    # 1 event, 1 agent, 3*1*1 capacity, pre "true" counts 1
    assert SKIP.size() == 1 + 1 + 3 + 1


@given(st.integers(0, 2**32 - 1))
def test_generated_frames_validate(seed):
    U = gen_frame(GenConfig(seed=seed))
    assert validate_frame(U) == []
    assert frame_from_dict(frame_to_dict(U), U.name) == U
