"""Random generators and bundled scenarios.

Generators take a :class:`GenConfig` and an optional ``random.Random``; when
no generator is passed, one is seeded from ``cfg.seed`` so that equal
configurations give equal outputs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .frames import AgentUpdateFrame, FrameError, frame_from_dict, validate_frame
from .model import KripkeModel, ModelError, model_from_dict, transitive_closure, validate
from .semantics import EvalContext, model_check
from .syntax import (
    TOP, And, Atom, DiamondUnion, DiamondUpdate, Formula, FormulaSyntaxError, Not,
    Possible, parse_formula, print_formula,
)
from .update import PreconditionFailure, iterate_updates

AGENT_POOL = ("a", "b", "c", "d", "e")
FRESH_AGENTS = ("n",)
LANGUAGES = ("EL", "DEL-", "DEL")


@dataclass
class GenConfig:
    max_worlds: int = 5
    max_agents: int = 3
    max_events: int = 3
    signature: Mapping[str, int] = field(default_factory=lambda: {"p": 0, "q": 0})
    max_depth: int = 3
    pre_depth: int = 1
    edge_prob: float = 0.3
    obs_prob: float = 0.5
    add_prob: float = 0.2
    del_prob: float = 0.15
    post_prob: float = 0.2
    pre_prob: float = 0.4
    n_frames: int = 2
    seed: int = 0

    def __post_init__(self):
        for name in ("max_worlds", "max_agents", "max_events", "max_depth", "n_frames"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.pre_depth < 0:
            raise ValueError("pre_depth must be non-negative")
        for name in ("edge_prob", "obs_prob", "add_prob", "del_prob", "post_prob", "pre_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.max_agents > len(AGENT_POOL):
            raise ValueError(f"max_agents is capped at {len(AGENT_POOL)}")

    @property
    def agents(self) -> tuple[str, ...]:
        return AGENT_POOL[: self.max_agents]

    def fluents(self) -> list[str]:
        """Ground fluents over the signature, with agent names as arguments."""
        out = []
        for pred, arity in sorted(self.signature.items()):
            if arity == 0:
                out.append(pred)
            else:
                out.append(f"{pred}({','.join(self.agents[i % len(self.agents)] for i in range(arity))})")
        return out

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def _rng(cfg: GenConfig, rng: random.Random | None) -> random.Random:
    return rng if rng is not None else cfg.rng()


def gen_model(cfg: GenConfig, rng: random.Random | None = None) -> KripkeModel:
    """A random transitive model with a designated world."""
    rng = _rng(cfg, rng)
    n = rng.randint(1, cfg.max_worlds)
    worlds = [f"s{i}" for i in range(n)]
    agents = cfg.agents[: rng.randint(1, cfg.max_agents)]
    relations = {}
    for a in agents:
        pairs = {(s, t) for s in worlds for t in worlds if rng.random() < cfg.edge_prob}
        relations[a] = transitive_closure(pairs)
    valuation = {p: {s for s in worlds if rng.random() < 0.5} for p in cfg.fluents()}
    return KripkeModel(frozenset(worlds), relations, valuation, rng.choice(worlds), frozenset(agents))


def _atom(key: str) -> Atom:
    f = parse_formula(key)
    assert isinstance(f, Atom)
    return f


def gen_el(cfg: GenConfig, depth: int, rng: random.Random, agents=None) -> Formula:
    """A random update-free formula of modal depth at most ``depth``."""
    agents = agents or cfg.agents
    fluents = cfg.fluents()
    kinds = {"atom": 3, "top": 1, "not": 2, "and": 2}
    if depth > 0:
        kinds["P"] = 4
    kind = rng.choices(list(kinds), weights=list(kinds.values()))[0]
    if kind == "atom":
        return _atom(rng.choice(fluents))
    if kind == "top":
        return TOP
    if kind == "not":
        return Not(gen_el(cfg, depth, rng, agents))
    if kind == "and":
        return And(gen_el(cfg, depth, rng, agents), gen_el(cfg, depth, rng, agents))
    return Possible(rng.choice(agents), gen_el(cfg, depth - 1, rng, agents))


def _small(cfg: GenConfig, depth: int, rng: random.Random, agents) -> Formula:
    # keeps boolean nesting shallow so formula size tracks modal depth
    f = gen_el(cfg, depth, rng, agents)
    return f if len(print_formula(f)) < 80 else _atom(rng.choice(cfg.fluents()))


def gen_frame(cfg: GenConfig, rng: random.Random | None = None, name: str = "U") -> AgentUpdateFrame:
    """A random agent-update frame; the first event is designated.

    Observability arrows are drawn over the configured agents.  Add arrows
    may name one fresh agent outside the pool.
    """
    rng = _rng(cfg, rng)
    k = rng.randint(1, cfg.max_events)
    events = [f"e{i}" for i in range(k)]
    agents = cfg.agents
    obs = {a: {(u, v) for u in events for v in events if rng.random() < cfg.obs_prob} for a in agents}
    add = {a: {(u, v) for u in events for v in events if rng.random() < cfg.add_prob}
           for a in agents + FRESH_AGENTS}
    delete = {a: {(u, v) for u in events for v in events if rng.random() < cfg.del_prob} for a in agents}
    pre = {u: _small(cfg, cfg.pre_depth, rng, agents) for u in events if rng.random() < cfg.pre_prob}
    post = {}
    for u in events:
        eff = {p: rng.random() < 0.5 for p in cfg.fluents() if rng.random() < cfg.post_prob}
        if eff:
            post[u] = eff
    return AgentUpdateFrame(events, obs, add, delete, pre, post, events[0], name)


def gen_frames(cfg: GenConfig, ctx: EvalContext, rng: random.Random | None = None) -> list[str]:
    """Generate ``cfg.n_frames`` frames, register them in ``ctx``, return their names."""
    rng = _rng(cfg, rng)
    names = []
    for i in range(cfg.n_frames):
        name = f"F{i}"
        ctx.register(name, gen_frame(cfg, rng, name))
        names.append(name)
    return names


def gen_formula(
    cfg: GenConfig,
    language: str = "EL",
    ctx: EvalContext | None = None,
    rng: random.Random | None = None,
) -> Formula:
    """A random formula of ``language`` with modal depth at most ``cfg.max_depth``.

    For the update languages, frames registered in ``ctx`` are used; if
    none are registered, ``cfg.n_frames`` fresh ones are generated first.
    """
    if language not in LANGUAGES:
        raise ValueError(f"language must be one of {LANGUAGES}")
    rng = _rng(cfg, rng)
    if language == "EL":
        return gen_el(cfg, cfg.max_depth, rng)
    if ctx is None:
        raise ValueError("update languages need an EvalContext to register frames in")
    if not ctx.frames:
        gen_frames(cfg, ctx, rng)
    frames = sorted(ctx.frames)
    agents = cfg.agents + FRESH_AGENTS

    def pointed():
        U = ctx.frames[rng.choice(frames)]
        return U.name, rng.choice(U.events)

    def go(depth: int) -> Formula:
        kinds = {"atom": 3, "top": 1, "not": 2, "and": 2}
        if depth > 0:
            kinds.update(P=3, U=3)
            if language == "DEL":
                kinds["union"] = 1
        kind = rng.choices(list(kinds), weights=list(kinds.values()))[0]
        if kind == "atom":
            return _atom(rng.choice(cfg.fluents()))
        if kind == "top":
            return TOP
        if kind == "not":
            return Not(go(depth))
        if kind == "and":
            return And(go(depth), go(depth))
        if kind == "P":
            return Possible(rng.choice(agents), go(depth - 1))
        if kind == "U":
            name, u = pointed()
            return DiamondUpdate(name, u, go(depth - 1))
        members = tuple(pointed() for _ in range(rng.randint(2, 3)))
        return DiamondUnion(members, go(depth - 1))

    return go(cfg.max_depth)


# -- scenarios ---------------------------------------------------------------

class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Assertion:
    step: int
    formula: str
    expected: bool = True


@dataclass(frozen=True)
class StructureCheck:
    """Expected agent sets of one event of a frame (``None`` means unchecked)."""

    frame: str
    event: str
    observers: frozenset[str] | None = None
    add: frozenset[str] | None = None
    delete: frozenset[str] | None = None


@dataclass
class Scenario:
    name: str
    model_path: Path
    steps: list[tuple[Path, str]]
    assertions: list[Assertion] = field(default_factory=list)
    structure: list[StructureCheck] = field(default_factory=list)
    frame_paths: dict[str, Path] = field(default_factory=dict)

    def __post_init__(self):
        for a in self.assertions:
            if not 0 <= a.step <= len(self.steps):
                raise ScenarioError(f"{self.name}: assertion step {a.step} outside 0..{len(self.steps)}")


@dataclass
class AssertionResult:
    step: int
    world: str
    formula: str
    expected: bool
    actual: bool | None
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.actual == self.expected

    def to_json(self) -> dict:
        return {"step": self.step, "world": self.world, "formula": self.formula,
                "expected": self.expected, "actual": self.actual,
                "passed": self.passed, "error": self.error}


@dataclass
class ScenarioReport:
    name: str
    results: list[AssertionResult]
    structure: list[dict] = field(default_factory=list)
    worlds: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return (self.error is None and all(r.passed for r in self.results)
                and all(s["passed"] for s in self.structure))

    def to_json(self) -> dict:
        return {"scenario": self.name, "ok": self.ok, "error": self.error,
                "worlds": self.worlds,
                "assertions": [r.to_json() for r in self.results],
                "structure": self.structure}


def _sorted_set(xs) -> frozenset[str] | None:
    return None if xs is None else frozenset(xs)


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file; paths inside it are relative to the file."""
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    base = path.parent
    try:
        steps = []
        for spec in d.get("steps", []):
            frame, _, event = spec.rpartition("@")
            if not frame:
                raise ScenarioError(f"{path}: step {spec!r} must read 'frame.json@event'")
            steps.append(((base / frame).resolve(), event))
        frame_paths = {p.stem: p for p, _ in steps}
        for name, rel in d.get("frames", {}).items():
            frame_paths[name] = (base / rel).resolve()
        assertions = [Assertion(int(a["step"]), a["formula"], bool(a.get("expected", True)))
                      for a in d.get("assertions", [])]
        structure = [StructureCheck(s["frame"], s["event"], _sorted_set(s.get("observers")),
                                    _sorted_set(s.get("add")), _sorted_set(s.get("del")))
                     for s in d.get("structure", [])]
        return Scenario(d.get("name", path.stem), (base / d["model"]).resolve(), steps,
                        assertions, structure, frame_paths)
    except KeyError as exc:
        raise ScenarioError(f"{path}: missing field {exc}") from exc


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def run_scenario(sc: Scenario, ctx: EvalContext | None = None) -> ScenarioReport:
    """Replay the update chain and evaluate every assertion at its step.

    Loading and validation problems abort with a :class:`ScenarioError`
    naming the file; a failing precondition is reported in ``error``.
    """
    from .frames import add_set, del_set, observers

    ctx = ctx if ctx is not None else EvalContext()
    try:
        m = model_from_dict(_load_json(sc.model_path))
    except (ModelError, KeyError, ValueError) as exc:
        raise ScenarioError(f"{sc.model_path}: {exc}") from exc
    problems = validate(m)
    if problems:
        raise ScenarioError(f"{sc.model_path}: {', '.join(map(str, problems))}")
    if m.designated is None:
        raise ScenarioError(f"{sc.model_path}: the initial model needs a designated world")
    for name, p in sc.frame_paths.items():
        try:
            U = frame_from_dict(_load_json(p), name)
        except (FrameError, FormulaSyntaxError, KeyError) as exc:
            raise ScenarioError(f"{p}: {exc}") from exc
        problems = validate_frame(U)
        if problems:
            raise ScenarioError(f"{p}: {', '.join(map(str, problems))}")
        ctx.register(name, U)

    structure = []
    for chk in sc.structure:
        U = ctx.frame(chk.frame)
        actual = {"observers": observers(U, chk.event), "add": add_set(U, chk.event),
                  "del": del_set(U, chk.event)}
        for key, want in (("observers", chk.observers), ("add", chk.add), ("del", chk.delete)):
            if want is not None:
                structure.append({"frame": chk.frame, "event": chk.event, "set": key,
                                  "expected": sorted(want), "actual": sorted(actual[key]),
                                  "passed": actual[key] == want})

    chain = [(m, m.designated)]
    error = None
    cur, w = m, m.designated
    for j, (p, event) in enumerate(sc.steps, start=1):
        U = ctx.frame(p.stem)
        try:
            cur, w = iterate_updates(cur, w, [(U, event)])
        except PreconditionFailure as exc:
            error = f"step {j}: {exc}"
            break
        chain.append((cur, w))

    results = []
    for a in sc.assertions:
        if a.step >= len(chain):
            results.append(AssertionResult(a.step, "", a.formula, a.expected, None,
                                           "step not reached"))
            continue
        model, world = chain[a.step]
        try:
            actual = model_check(model, world, parse_formula(a.formula), ctx)
        except (FormulaSyntaxError, KeyError, ValueError) as exc:
            results.append(AssertionResult(a.step, world, a.formula, a.expected, None, str(exc)))
            continue
        results.append(AssertionResult(a.step, world, a.formula, a.expected, actual))
    return ScenarioReport(sc.name, results, structure, sorted(chain[-1][0].worlds), error)


def bundled_data() -> Path:
    """Directory holding the bundled models, frames and scenario files."""
    return Path(str(resources.files("audel") / "data"))


def bundled_scenarios() -> dict[str, Path]:
    return {p.stem: p for p in sorted((bundled_data() / "scenarios").glob("*.json"))}


def resolve_scenario(name_or_path: str | Path) -> Path:
    """A path as given, or the bundled scenario of that name."""
    p = Path(name_or_path)
    if p.exists():
        return p
    bundled = bundled_scenarios()
    key = p.stem if p.suffix == ".json" else str(name_or_path)
    if key in bundled:
        return bundled[key]
    raise ScenarioError(f"no scenario file or bundled scenario named {name_or_path!r}")
