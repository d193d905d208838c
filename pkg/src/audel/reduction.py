"""Compile DEL formulas to update-free EL by left-to-right rewriting.

Rule ids in traces:

``top``   ``<U@u> true`` becomes ``pre(u)``
``5``     atoms: ``pre(u) & ((p & [post=no]) | [post=set])``
``6``     negation: ``pre(u) & ~<U@u> phi``
``7``     conjunction, the ``&``-dual of distribution over ``|``:
          ``<U@u>(a & b)`` becomes ``<U@u>a & <U@u>b`` (updates are
          deterministic, so ``<U@u>`` commutes with both connectives)
``8``     belief of an agent not being added at ``u``
``9``     belief of an agent added (and not deleted) at ``u``
``13``    union update into a disjunction of single updates
``simp``  unit laws, ``false`` absorption and double negation
"""

from __future__ import annotations

from dataclasses import dataclass

from .frames import add_set, del_set, observers
from .semantics import EvalContext
from .syntax import (
    BOT, TOP, And, Atom, DiamondUnion, DiamondUpdate, Formula, Not, Possible, Top,
    children, disj, is_el, node_count, print_formula,
)

Path = tuple[int, ...]


class ReductionBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceEntry:
    position: Path
    rule: str
    before: Formula
    after: Formula

    def to_json(self) -> dict:
        return {
            "position": list(self.position),
            "rule": self.rule,
            "before": print_formula(self.before),
            "after": print_formula(self.after),
        }


def get_at(f: Formula, path: Path) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def replace_at(f: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(f, And):
        if i == 0:
            return And(replace_at(f.left, rest, new), f.right)
        return And(f.left, replace_at(f.right, rest, new))
    sub = replace_at(f.sub, rest, new)
    if isinstance(f, Not):
        return Not(sub)
    if isinstance(f, Possible):
        return Possible(f.agent, sub)
    if isinstance(f, DiamondUpdate):
        return DiamondUpdate(f.frame, f.event, sub)
    if isinstance(f, DiamondUnion):
        return DiamondUnion(f.pointed, sub)
    raise TypeError(f"cannot descend into {f!r}")


def replay(f: Formula, trace: list[TraceEntry]) -> Formula:
    for e in trace:
        if get_at(f, e.position) != e.before:
            raise ValueError(f"trace does not match at {e.position}")
        f = replace_at(f, e.position, e.after)
    return f


def find_redex(f: Formula, path: Path = ()) -> Path | None:
    """Leftmost update node whose body is update-free."""
    if isinstance(f, (DiamondUpdate, DiamondUnion)) and is_el(f.sub):
        return path
    for i, c in enumerate(children(f)):
        p = find_redex(c, path + (i,))
        if p is not None:
            return p
    return None


def _shallow(f: Formula) -> Formula:
    """One level of simplification, assuming the children are already simplified."""
    if isinstance(f, Not) and isinstance(f.sub, Not):
        return f.sub.sub
    if isinstance(f, And):
        a, b = f.left, f.right
        if a == BOT or b == BOT:
            return BOT
        if a == TOP:
            return b
        if b == TOP or a == b:
            return a
    return f


def simplify(f: Formula) -> Formula:
    """Semantically inert clean-up: unit laws, ``false`` absorption, ``~~x = x``."""
    if isinstance(f, (Top, Atom)):
        return f
    if isinstance(f, Not):
        return _shallow(Not(simplify(f.sub)))
    if isinstance(f, And):
        return _shallow(And(simplify(f.left), simplify(f.right)))
    sub = simplify(f.sub)
    if isinstance(f, Possible):
        return Possible(f.agent, sub)
    if isinstance(f, DiamondUpdate):
        return DiamondUpdate(f.frame, f.event, sub)
    return DiamondUnion(f.pointed, sub)


def rewrite(node: Formula, ctx: EvalContext) -> tuple[str, Formula]:
    """One reduction equivalence applied at ``node`` (an update with EL body)."""
    if isinstance(node, DiamondUnion):
        return "13", disj(*(DiamondUpdate(U, u, node.sub) for U, u in node.pointed))
    if not isinstance(node, DiamondUpdate):
        raise TypeError(f"not an update modality: {node!r}")
    U = ctx.frame(node.frame)
    u = node.event
    pre = U.precondition(u)
    body = node.sub

    def dia(v: str, g: Formula) -> Formula:
        return DiamondUpdate(node.frame, v, g)

    if isinstance(body, Top):
        return "top", pre
    if isinstance(body, Atom):
        eff = U.postcondition(u, body.key)
        unchanged = TOP if eff is None else BOT
        set_true = TOP if eff is True else BOT
        return "5", And(pre, disj(And(body, unchanged), set_true))
    if isinstance(body, Not):
        return "6", And(pre, Not(dia(u, body.sub)))
    if isinstance(body, And):
        return "7", And(dia(u, body.left), dia(u, body.right))
    if isinstance(body, Possible):
        a, phi = body.agent, body.sub
        if a in add_set(U, u) and a not in del_set(U, u):
            terms = [Possible(a, dia(v, phi)) for v in sorted(U.obs_successors(a, u))]
            terms += [dia(w, phi) for w in sorted(U.add_successors(a, u))]
            terms += [Possible(b, dia(u, phi)) for b in sorted(observers(U, u))]
            return "9", And(pre, disj(*terms))
        terms = [Possible(a, dia(v, phi)) for v in sorted(U.obs_successors(a, u))
                 if not U.is_deleted(a, u, v)]
        return "8", And(pre, disj(*terms))
    raise TypeError(f"body is not EL: {body!r}")


def reduce_step(f: Formula, ctx: EvalContext) -> tuple[Formula, list[TraceEntry]] | None:
    """Rewrite the leftmost innermost update; ``None`` when ``f`` is EL.

    Returns the new formula and the trace entries produced: the rule
    application, then a ``simp`` entry at the highest position that
    simplification changed, if any.
    """
    path = find_redex(f)
    if path is None:
        return None
    node = get_at(f, path)
    rule, after = rewrite(node, ctx)
    trace = [TraceEntry(path, rule, node, after)]
    f = replace_at(f, path, after)
    # clean the new subtree, then its ancestors one level at a time
    g = replace_at(f, path, simplify(after))
    top = len(path) if g != f else None
    for k in range(len(path) - 1, -1, -1):
        anc = get_at(g, path[:k])
        cleaned = _shallow(anc)
        if cleaned != anc:
            g = replace_at(g, path[:k], cleaned)
            top = k
    if top is not None:
        at = path[:top]
        trace.append(TraceEntry(at, "simp", get_at(f, at), get_at(g, at)))
        f = g
    return f, trace


def _update_height(f: Formula, keys: list) -> int:
    hs = [_update_height(c, keys) for c in children(f)]
    below = max(hs, default=0)
    if isinstance(f, (DiamondUpdate, DiamondUnion)):
        h = below + 1
        if h == 1:
            size = node_count(f.sub) + (1 if isinstance(f, DiamondUnion) else 0)
            keys.append((1, size))
        else:
            keys.append((h, 0))
        return h
    return below


def termination_measure(f: Formula) -> tuple:
    """Multiset of update-node weights, as a descending tuple.

    A node with update-free body weighs ``(1, body size)``; any other update
    node weighs ``(height, 0)``.  Every rewrite step strictly decreases this
    in the multiset ordering, i.e. lexicographically on the sorted tuple.
    """
    keys: list = []
    _update_height(f, keys)
    return tuple(sorted(keys, reverse=True))


def reduce_to_el(
    f: Formula,
    ctx: EvalContext,
    budget: int = 100_000,
    check_measure: bool = False,
) -> tuple[Formula, list[TraceEntry]]:
    """Rewrite ``f`` until no update modality remains."""
    trace: list[TraceEntry] = []
    measure = termination_measure(f) if check_measure else None
    for _ in range(budget):
        step = reduce_step(f, ctx)
        if step is None:
            return f, trace
        f, entries = step
        trace.extend(entries)
        if check_measure:
            new = termination_measure(f)
            if not new < measure:
                raise AssertionError(f"termination measure did not decrease: {measure} -> {new}")
            measure = new
    if find_redex(f) is None:
        return f, trace
    raise ReductionBudgetExceeded(f"no EL normal form within {budget} steps")
