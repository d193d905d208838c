"""Constant-domain Kripke models over agents and fluents."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

Pair = tuple[str, str]
Relation = frozenset  # of Pair


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    agent: str | None = None
    detail: tuple = ()

    def __str__(self) -> str:
        args = ", ".join(str(x) for x in ((self.agent,) if self.agent else ()) + self.detail)
        return f"{self.kind}({args})"


@dataclass(frozen=True)
class KripkeModel:
    """Worlds, per-agent accessibility pairs and a fluent valuation.

    ``relations`` maps an agent to a frozenset of ``(s, t)`` pairs and
    ``valuation`` maps a fluent key such as ``p(f,o,g)`` to the worlds where
    it holds.  ``declared_agents`` lets a model name agents that have no
    arrows yet (they are still reported by :attr:`agents`).
    """

    worlds: frozenset[str]
    relations: Mapping[str, frozenset[Pair]] = field(default_factory=dict)
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)
    designated: str | None = None
    declared_agents: frozenset[str] = frozenset()

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "worlds", frozenset(self.worlds))
        set_(self, "relations", {a: frozenset(tuple(p) for p in r) for a, r in self.relations.items()})
        set_(self, "valuation", {k: frozenset(v) for k, v in self.valuation.items()})
        set_(self, "declared_agents", frozenset(self.declared_agents))

    @property
    def agents(self) -> frozenset[str]:
        return self.declared_agents | {a for a, r in self.relations.items() if r}

    @cached_property
    def _succ(self) -> dict[str, dict[str, frozenset[str]]]:
        out = {}
        for a, r in self.relations.items():
            d = defaultdict(set)
            for s, t in r:
                d[s].add(t)
            out[a] = {s: frozenset(ts) for s, ts in d.items()}
        return out

    def successors(self, agent: str, s: str) -> frozenset[str]:
        return self._succ.get(agent, {}).get(s, frozenset())

    def holds(self, fluent: str, s: str) -> bool:
        return s in self.valuation.get(fluent, ())

    def relation(self, agent: str) -> frozenset[Pair]:
        return self.relations.get(agent, frozenset())

    def with_designated(self, s: str) -> "KripkeModel":
        if s not in self.worlds:
            raise ModelError(f"unknown world {s!r}")
        return KripkeModel(self.worlds, self.relations, self.valuation, s, self.declared_agents)

    def __repr__(self) -> str:
        return (f"KripkeModel(|S|={len(self.worlds)}, agents={sorted(self.agents)}, "
                f"designated={self.designated!r})")


def transitive_closure(pairs: Iterable[Pair]) -> frozenset[Pair]:
    """Smallest transitive superset of ``pairs``."""
    succ = defaultdict(set)
    for s, t in pairs:
        succ[s].add(t)
    out = set()
    for s in list(succ):
        seen = set()
        stack = list(succ[s])
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            seen.add(t)
            stack.extend(succ.get(t, ()))
        out.update((s, t) for t in seen)
    return frozenset(out)


def is_transitive(pairs: Iterable[Pair]) -> bool:
    pairs = frozenset(pairs)
    return transitive_closure(pairs) == pairs


def close_model(m: KripkeModel) -> KripkeModel:
    return KripkeModel(
        m.worlds,
        {a: transitive_closure(r) for a, r in m.relations.items()},
        m.valuation,
        m.designated,
        m.declared_agents,
    )


def validate(m: KripkeModel, transitive: bool = True) -> list[Violation]:
    """Structural problems of ``m`` as data; empty means the model is sound."""
    out = []
    if m.designated is not None and m.designated not in m.worlds:
        out.append(Violation("unknown-designated", None, (m.designated,)))
    for a in sorted(m.relations):
        r = m.relations[a]
        for s, t in sorted(r):
            if s not in m.worlds or t not in m.worlds:
                out.append(Violation("dangling-endpoint", a, (s, t)))
        if transitive:
            for s, v in sorted(transitive_closure(r) - r):
                out.append(Violation("non-transitive", a, (s, v)))
    for p in sorted(m.valuation):
        for s in sorted(m.valuation[p] - m.worlds):
            out.append(Violation("dangling-valuation", None, (p, s)))
    return out


def agency(m: KripkeModel, s: str) -> frozenset[str]:
    """Agents with at least one outgoing arrow at ``s``, i.e. where ``P[i] true`` holds."""
    if s not in m.worlds:
        raise ModelError(f"unknown world {s!r}")
    return frozenset(a for a in m.relations if m.successors(a, s))


def reachable_submodel(m: KripkeModel, s: str | None = None) -> KripkeModel:
    """The submodel generated by ``s`` (default: the designated world).

    Truth of every formula at ``s`` is unchanged.
    """
    s = m.designated if s is None else s
    if s not in m.worlds:
        raise ModelError(f"unknown world {s!r}")
    seen = {s}
    stack = [s]
    while stack:
        w = stack.pop()
        for a in m.relations:
            for t in m.successors(a, w):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return KripkeModel(
        seen,
        {a: {(x, y) for x, y in r if x in seen} for a, r in m.relations.items()},
        {p: ws & seen for p, ws in m.valuation.items()},
        s,
        m.declared_agents,
    )


# -- world labels ------------------------------------------------------------

def compose_world(s: str, event: str) -> str:
    """Label of the updated world ``(s, event)``, flattening nested tuples."""
    if s.startswith("(") and s.endswith(")"):
        return f"{s[:-1]},{event})"
    return f"({s},{event})"


# -- JSON --------------------------------------------------------------------

def expand_groups(table: Mapping[str, list], groups: Mapping[str, list[str]]) -> dict[str, set]:
    """Copy entries declared on a group name to every member."""
    out = defaultdict(set)
    for name, pairs in table.items():
        members = groups.get(name, [name])
        for agent in members:
            out[agent].update(tuple(p) for p in pairs)
    return dict(out)


def model_from_dict(d: Mapping) -> KripkeModel:
    groups = d.get("groups", {})
    declared = set()
    for a in d.get("agents", []):
        declared.update(groups.get(a, [a]))
    relations = expand_groups(d.get("relations", {}), groups)
    for pairs in relations.values():
        for p in pairs:
            if len(p) != 2:
                raise ModelError(f"relation entries must be pairs, got {list(p)}")
    return KripkeModel(
        frozenset(d["worlds"]),
        relations,
        {k: frozenset(v) for k, v in d.get("valuation", {}).items()},
        d.get("designated"),
        frozenset(declared),
    )


def model_to_dict(m: KripkeModel) -> dict:
    d = {
        "worlds": sorted(m.worlds),
        "agents": sorted(m.agents),
        "relations": {a: sorted([list(p) for p in r]) for a, r in sorted(m.relations.items()) if r},
        "valuation": {p: sorted(ws) for p, ws in sorted(m.valuation.items()) if ws},
    }
    if m.designated is not None:
        d = {"worlds": d.pop("worlds"), "designated": m.designated, **d}
    return d


def load_model(path: str | Path) -> KripkeModel:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"{path}: {exc}") from exc
    try:
        return model_from_dict(d)
    except KeyError as exc:
        raise ModelError(f"{path}: missing field {exc}") from exc


def save_model(m: KripkeModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(m), indent=2) + "\n")


# -- DOT ---------------------------------------------------------------------

def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def to_dot(m: KripkeModel, name: str = "M") -> str:
    """Graphviz rendering.

    A bidirectional pair becomes two directed edges; parallel edges in the
    same direction share one edge whose label lists the agents.
    """
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    facts = defaultdict(list)
    for p, ws in sorted(m.valuation.items()):
        for w in ws:
            facts[w].append(p)
    for w in sorted(m.worlds):
        attrs = ["shape=doublecircle" if w == m.designated else "shape=circle"]
        label = w if not facts[w] else w + "\n" + ", ".join(facts[w])
        attrs.append(f"label={_q(label)}")
        lines.append(f"  {_q(w)} [{', '.join(attrs)}];")
    edges = defaultdict(list)
    for a, r in sorted(m.relations.items()):
        for s, t in r:
            edges[(s, t)].append(a)
    for (s, t), agents in sorted(edges.items()):
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(','.join(sorted(agents)))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
