"""Action frames and agent-update frames.

A plain action frame is an :class:`AgentUpdateFrame` whose ``add`` and
``delete`` relations are empty.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping

from .model import Pair, Violation, expand_groups
from .syntax import TOP, Atom, Formula, FormulaSyntaxError, check_signature, formula_length, is_el, parse_formula

POST_VALUES = {"true": True, "false": False, "no": None}


class FrameError(ValueError):
    pass


def _succ(rel: Mapping[str, frozenset[Pair]]) -> dict[str, dict[str, frozenset[str]]]:
    out = {}
    for a, pairs in rel.items():
        d = defaultdict(set)
        for u, v in pairs:
            d[u].add(v)
        out[a] = {u: frozenset(vs) for u, vs in d.items()}
    return out


@dataclass(frozen=True)
class AgentUpdateFrame:
    """Events with per-agent observability, sum (``add``) and difference
    (``delete``) arrows, preconditions and postconditions.

    ``post[u]`` maps a fluent key to ``True`` (set), ``False`` (clear);
    missing keys mean no change.
    """

    events: tuple[str, ...]
    obs: Mapping[str, frozenset[Pair]] = field(default_factory=dict)
    add: Mapping[str, frozenset[Pair]] = field(default_factory=dict)
    delete: Mapping[str, frozenset[Pair]] = field(default_factory=dict)
    pre: Mapping[str, Formula] = field(default_factory=dict)
    post: Mapping[str, Mapping[str, bool]] = field(default_factory=dict)
    designated: str | None = None
    name: str = "U"

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "events", tuple(self.events))
        for attr in ("obs", "add", "delete"):
            rel = getattr(self, attr)
            set_(self, attr, {a: frozenset(tuple(p) for p in r) for a, r in rel.items() if r})
        set_(self, "pre", {u: f for u, f in self.pre.items() if f != TOP})
        set_(self, "post", {u: dict(p) for u, p in self.post.items() if p})

    @cached_property
    def _obs(self):
        return _succ(self.obs)

    @cached_property
    def _add(self):
        return _succ(self.add)

    @cached_property
    def _del(self):
        return _succ(self.delete)

    @property
    def agents(self) -> frozenset[str]:
        return frozenset(self.obs) | frozenset(self.add) | frozenset(self.delete)

    def _check(self, u: str) -> None:
        if u not in self.events:
            raise FrameError(f"unknown event {u!r} in frame {self.name!r}")

    def precondition(self, u: str) -> Formula:
        self._check(u)
        return self.pre.get(u, TOP)

    def postcondition(self, u: str, fluent: str) -> bool | None:
        return self.post.get(u, {}).get(fluent)

    def obs_successors(self, agent: str, u: str) -> frozenset[str]:
        return self._obs.get(agent, {}).get(u, frozenset())

    def add_successors(self, agent: str, u: str) -> frozenset[str]:
        return self._add.get(agent, {}).get(u, frozenset())

    def del_successors(self, agent: str, u: str) -> frozenset[str]:
        return self._del.get(agent, {}).get(u, frozenset())

    def is_deleted(self, agent: str, u: str, v: str) -> bool:
        return v in self.del_successors(agent, u)

    def is_action_frame(self) -> bool:
        return not self.add and not self.delete

    def size(self) -> int:
        """Events + agents + 3*|A|*|E|^2 + precondition lengths + postcondition entries."""
        n_e, n_a = len(self.events), len(self.agents)
        pre = sum(formula_length(self.pre.get(u, TOP)) for u in self.events)
        post = sum(len(p) for p in self.post.values())
        return n_e + n_a + 3 * n_a * n_e * n_e + pre + post


def add_set(U: AgentUpdateFrame, u: str) -> frozenset[str]:
    U._check(u)
    return frozenset(a for a in U.add if U.add_successors(a, u))


def del_set(U: AgentUpdateFrame, u: str) -> frozenset[str]:
    U._check(u)
    return frozenset(a for a in U.delete if U.del_successors(a, u))


def observers(U: AgentUpdateFrame, u: str) -> frozenset[str]:
    """Agents whose only observability arrow at ``u`` is the self-loop."""
    U._check(u)
    return frozenset(a for a in U.obs if U.obs_successors(a, u) == {u})


def validate_frame(U: AgentUpdateFrame, signature: Mapping[str, int] | None = None) -> list[Violation]:
    out = []
    events = set(U.events)
    if len(events) != len(U.events):
        out.append(Violation("duplicate-event"))
    if U.designated is not None and U.designated not in events:
        out.append(Violation("unknown-designated", None, (U.designated,)))
    for kind, rel in (("obs", U.obs), ("add", U.add), ("del", U.delete)):
        for a in sorted(rel):
            for u, v in sorted(rel[a]):
                if u not in events or v not in events:
                    out.append(Violation("dangling-event", a, (kind, u, v)))
    for u in sorted(U.pre):
        if u not in events:
            out.append(Violation("dangling-event", None, ("pre", u)))
        elif not is_el(U.pre[u]):
            out.append(Violation("non-EL-precondition", None, (u,)))
        if signature is not None:
            try:
                check_signature(U.pre[u], signature)
            except ValueError as exc:
                out.append(Violation("signature", None, (u, str(exc))))
    for u in sorted(U.post):
        if u not in events:
            out.append(Violation("dangling-event", None, ("post", u)))
        if signature is not None:
            for key in U.post[u]:
                try:
                    check_signature(parse_formula(key), signature)
                except ValueError as exc:
                    out.append(Violation("signature", None, (u, str(exc))))
    return out


# -- JSON --------------------------------------------------------------------

def _parse_post_key(key: str) -> str:
    try:
        f = parse_formula(key)
    except FormulaSyntaxError as exc:
        raise FrameError(f"bad postcondition fluent {key!r}: {exc}") from exc
    if not isinstance(f, Atom):
        raise FrameError(f"postcondition key {key!r} is not a fluent")
    return f.key


def frame_from_dict(d: Mapping, name: str = "U") -> AgentUpdateFrame:
    """Build a frame from the JSON layout; group names expand to members."""
    groups = d.get("groups", {})
    events = list(d["events"])
    pre = {}
    for u, text in d.get("pre", {}).items():
        try:
            pre[u] = parse_formula(text)
        except FormulaSyntaxError as exc:
            raise FrameError(f"frame {name!r}, pre({u}): {exc}") from exc
    post = {}
    for u, assignment in d.get("post", {}).items():
        post[u] = {}
        for key, value in assignment.items():
            if value not in POST_VALUES:
                raise FrameError(f"frame {name!r}, post({u})({key}) must be true/false/no")
            if POST_VALUES[value] is not None:
                post[u][_parse_post_key(key)] = POST_VALUES[value]
    return AgentUpdateFrame(
        events=events,
        obs=expand_groups(d.get("obs", {}), groups),
        add=expand_groups(d.get("add", {}), groups),
        delete=expand_groups(d.get("del", {}), groups),
        pre=pre,
        post=post,
        designated=d.get("designated"),
        name=d.get("name", name),
    )


def frame_to_dict(U: AgentUpdateFrame) -> dict:
    from .syntax import print_formula

    d = {"events": list(U.events)}
    if U.designated is not None:
        d["designated"] = U.designated
    for key, rel in (("obs", U.obs), ("add", U.add), ("del", U.delete)):
        d[key] = {a: sorted([list(p) for p in r]) for a, r in sorted(rel.items())}
    d["pre"] = {u: print_formula(f) for u, f in U.pre.items() if f != TOP}
    d["post"] = {u: {k: "true" if v else "false" for k, v in sorted(p.items())}
                 for u, p in U.post.items()}
    return d


def load_frame(path: str | Path, name: str | None = None) -> AgentUpdateFrame:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FrameError(f"{path}: {exc}") from exc
    try:
        return frame_from_dict(d, name or path.stem)
    except KeyError as exc:
        raise FrameError(f"{path}: missing field {exc}") from exc


def load_frame_dir(directory: str | Path) -> dict[str, AgentUpdateFrame]:
    """Every ``*.json`` in ``directory`` that parses as a frame, keyed by file stem."""
    out = {}
    for p in sorted(Path(directory).glob("*.json")):
        try:
            d = json.loads(p.read_text())
        except json.JSONDecodeError:
            continue
        if isinstance(d, dict) and "events" in d:
            out[p.stem] = frame_from_dict(d, p.stem)
    return out


def frame_signature_atoms(U: AgentUpdateFrame) -> list[Formula]:
    """All fluents mentioned by pre/postconditions, for signature checks."""
    out: list[Formula] = list(U.pre.values())
    for p in U.post.values():
        out.extend(parse_formula(k) for k in p)
    return out

