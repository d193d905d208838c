"""Product update and sum-product update of Kripke models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from . import semantics
from .frames import AgentUpdateFrame, add_set, del_set, observers
from .model import KripkeModel, compose_world, transitive_closure


class PreconditionFailure(ValueError):
    def __init__(self, step: int, world: str, frame: str, event: str):
        self.step = step
        super().__init__(
            f"step {step}: precondition of {frame}@{event} fails at world {world!r}"
        )


@dataclass(frozen=True)
class UpdateResult:
    model: KripkeModel
    origin: Mapping[str, tuple[str, str]]
    updated_agents: frozenset[str]

    def world(self, s: str, u: str) -> str:
        w = compose_world(s, u)
        if w not in self.origin:
            raise KeyError(f"({s},{u}) is not a world of the updated model")
        return w


def _updated_worlds(m: KripkeModel, U: AgentUpdateFrame):
    """Surviving pairs and the updated valuation."""
    origin = {}
    by_pair = {}
    for u in U.events:
        holds = semantics.extension(m, U.precondition(u))
        for s in holds:
            w = compose_world(s, u)
            origin[w] = (s, u)
            by_pair[(s, u)] = w
    fluents = set(m.valuation)
    for p in U.post.values():
        fluents.update(p)
    valuation = {}
    for p in fluents:
        ws = set()
        for w, (s, u) in origin.items():
            eff = U.postcondition(u, p)
            if eff is True or (eff is None and m.holds(p, s)):
                ws.add(w)
        valuation[p] = frozenset(ws)
    return origin, by_pair, valuation


def _designated(m: KripkeModel, U: AgentUpdateFrame, by_pair) -> str | None:
    if m.designated is None or U.designated is None:
        return None
    return by_pair.get((m.designated, U.designated))


def product_update(m: KripkeModel, U: AgentUpdateFrame) -> UpdateResult:
    """Plain product update; no transitive closure is applied."""
    if not U.is_action_frame():
        raise ValueError(f"frame {U.name!r} has add/delete arrows; use sum_product_update")
    origin, by_pair, valuation = _updated_worlds(m, U)
    relations = {}
    for a in m.agents | U.agents:
        pairs = set()
        for w, (s, u) in origin.items():
            for t in m.successors(a, s):
                for v in U.obs_successors(a, u):
                    w2 = by_pair.get((t, v))
                    if w2 is not None:
                        pairs.add((w, w2))
        if pairs:
            relations[a] = frozenset(pairs)
    model = KripkeModel(frozenset(origin), relations, valuation, _designated(m, U, by_pair))
    return UpdateResult(model, origin, frozenset(relations))


def arrow_sources(m: KripkeModel, U: AgentUpdateFrame, agent: str, origin=None, by_pair=None):
    """The unforgotten, ascribed and inherited arrows of ``agent`` before closure."""
    if origin is None:
        origin, by_pair, _ = _updated_worlds(m, U)
    unf, asc, inh = set(), set(), set()
    obs_cache = {}
    for w, (s, u) in origin.items():
        for t in m.successors(agent, s):
            for v in U.obs_successors(agent, u):
                if U.is_deleted(agent, u, v):
                    continue
                w2 = by_pair.get((t, v))
                if w2 is not None:
                    unf.add((w, w2))
        if agent in add_set(U, u) and agent not in del_set(U, u):
            for v in U.add_successors(agent, u):
                w2 = by_pair.get((s, v))
                if w2 is not None:
                    asc.add((w, w2))
            if u not in obs_cache:
                obs_cache[u] = observers(U, u)
            for b in obs_cache[u]:
                for t in m.successors(b, s):
                    w2 = by_pair.get((t, u))
                    if w2 is not None:
                        inh.add((w, w2))
    return unf, asc, inh


def sum_product_update(m: KripkeModel, U: AgentUpdateFrame) -> UpdateResult:
    """Sum-product update: per agent, the transitive closure of the
    unforgotten, ascribed and inherited arrows."""
    origin, by_pair, valuation = _updated_worlds(m, U)
    relations = {}
    for a in sorted(m.agents | U.agents):
        unf, asc, inh = arrow_sources(m, U, a, origin, by_pair)
        pairs = transitive_closure(unf | asc | inh)
        if pairs:
            relations[a] = pairs
    model = KripkeModel(frozenset(origin), relations, valuation, _designated(m, U, by_pair))
    return UpdateResult(model, origin, frozenset(relations))


def iterate_updates(
    m: KripkeModel,
    s: str,
    steps: Sequence[tuple[AgentUpdateFrame, str]],
) -> tuple[KripkeModel, str]:
    """Apply ``(frame, event)`` steps left to right from world ``s``.

    Returns the final model (designated at the composite world) and that
    world's label.  Raises :class:`PreconditionFailure` naming the 1-based
    step whose precondition fails at the current world.
    """
    if s not in m.worlds:
        raise KeyError(f"unknown world {s!r}")
    cur, w = m.with_designated(s), s
    for j, (U, u) in enumerate(steps, start=1):
        if not semantics.model_check(cur, w, U.precondition(u)):
            raise PreconditionFailure(j, w, U.name, u)
        res = sum_product_update(cur, U)
        w = compose_world(w, u)
        cur = res.model.with_designated(w)
    return cur, w
