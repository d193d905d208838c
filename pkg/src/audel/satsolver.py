"""Satisfiability of EL over transitive (K4) frames.

:func:`sat_k4` is a labelled tableau with the K4 propagation rule and
subset blocking against ancestors; seriality is not assumed, so
``B[a] false`` is satisfiable.  :func:`brute_force_sat` enumerates every
transitive model up to a size bound and serves as an independent oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .model import KripkeModel, transitive_closure, validate
from .reduction import reduce_to_el
from .semantics import EvalContext, model_check
from .syntax import (
    And, Atom, Formula, Not, Possible, Top, agents_of, atoms, is_el, print_formula,
)

SAT = "SAT"
UNSAT = "UNSAT"


class NotEL(ValueError):
    pass


@dataclass
class SatOutcome:
    verdict: str
    witness: KripkeModel | None = None
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.verdict == SAT

    def __bool__(self) -> bool:
        return self.sat


def _neg(f: Formula) -> Formula:
    return f.sub if isinstance(f, Not) else Not(f)


def _order(f: Formula) -> tuple[int, str]:
    return (len(print_formula(f)), print_formula(f))


def _saturate(label: frozenset[Formula]) -> Iterator[frozenset[Formula]]:
    """All clash-free propositional saturations of ``label``."""
    todo = sorted(label, key=_order)
    yield from _sat_rec(set(), todo)


def _clash(done: set, f: Formula) -> bool:
    if isinstance(f, Not) and isinstance(f.sub, Top):
        return True
    return _neg(f) in done


def _sat_rec(done: set, todo: list) -> Iterator[frozenset[Formula]]:
    done = set(done)
    todo = list(todo)
    while todo:
        f = todo.pop()
        if f in done:
            continue
        if _clash(done, f):
            return
        done.add(f)
        if isinstance(f, And):
            todo += [f.left, f.right]
        elif isinstance(f, Not):
            g = f.sub
            if isinstance(g, Not):
                todo.append(g.sub)
            elif isinstance(g, And):
                for branch in (_neg(g.left), _neg(g.right)):
                    yield from _sat_rec(done, todo + [branch])
                return
    yield frozenset(done)


@dataclass
class _Node:
    label: frozenset
    edges: dict = field(default_factory=dict)  # agent -> list of node ids


class _Tableau:
    def __init__(self, max_nodes: int = 200_000):
        self.nodes: list[_Node] = []
        self.unsat_cores: set[frozenset] = set()
        self.max_nodes = max_nodes
        self.max_depth = 0

    def expand(self, core: frozenset, ancestors: list[int]) -> int | None:
        """Return the id of a node satisfying ``core``, or None."""
        if core in self.unsat_cores:
            return None
        self.max_depth = max(self.max_depth, len(ancestors))
        mark = len(self.nodes)
        for label in _saturate(core):
            if len(self.nodes) > self.max_nodes:
                raise RuntimeError("tableau node budget exhausted")
            nid = len(self.nodes)
            self.nodes.append(_Node(label))
            path = ancestors + [nid]
            if self._expand_diamonds(nid, label, path):
                return nid
            del self.nodes[mark:]
        self.unsat_cores.add(core)
        return None

    def _expand_diamonds(self, nid: int, label: frozenset, path: list[int]) -> bool:
        boxes: dict[str, list[Formula]] = {}
        diamonds = []
        for f in label:
            if isinstance(f, Possible):
                diamonds.append(f)
            elif isinstance(f, Not) and isinstance(f.sub, Possible):
                boxes.setdefault(f.sub.agent, []).append(f)
        for d in sorted(diamonds, key=_order):
            a = d.agent
            core = {d.sub}
            for box in boxes.get(a, ()):
                core.add(_neg(box.sub.sub))
                core.add(box)
            core = frozenset(core)
            target = next((p for p in reversed(path) if core <= self.nodes[p].label), None)
            if target is None:
                target = self.expand(core, path)
                if target is None:
                    return False
            self.nodes[nid].edges.setdefault(a, []).append(target)
        return True

    def model(self, root: int) -> KripkeModel:
        worlds = {f"w{i}" for i in range(len(self.nodes))}
        rel: dict[str, set] = {}
        valuation: dict[str, set] = {}
        for i, n in enumerate(self.nodes):
            for a, targets in n.edges.items():
                rel.setdefault(a, set()).update((f"w{i}", f"w{j}") for j in targets)
            for f in n.label:
                if isinstance(f, Atom):
                    valuation.setdefault(f.key, set()).add(f"w{i}")
        rel = {a: transitive_closure(r) for a, r in rel.items()}
        return KripkeModel(worlds, rel, valuation, f"w{root}")


def sat_k4(f: Formula, verify: bool = True) -> SatOutcome:
    """Decide K4 satisfiability of an EL formula.

    SAT outcomes carry a finite transitive witness designated at the
    satisfying world; it is re-checked with the model checker.
    """
    if not is_el(f):
        raise NotEL("sat_k4 needs an update-free formula; reduce it first")
    tab = _Tableau()
    root = tab.expand(frozenset([f]), [])
    stats = {"nodes": len(tab.nodes), "max_depth": tab.max_depth}
    if root is None:
        return SatOutcome(UNSAT, None, stats)
    witness = tab.model(root)
    if verify:
        assert not validate(witness), "witness not transitive"
        assert model_check(witness, witness.designated, f), "tableau witness fails the formula"
    return SatOutcome(SAT, witness, stats)


def valid_k4(f: Formula) -> bool:
    return not sat_k4(Not(f)).sat


def sat_del(f: Formula, ctx: EvalContext | None = None) -> SatOutcome:
    """Reduce to EL, decide with :func:`sat_k4`, verify the witness on ``f``."""
    ctx = ctx if ctx is not None else EvalContext()
    el, trace = reduce_to_el(f, ctx)
    out = sat_k4(el)
    out.stats["reduction_steps"] = len(trace)
    out.stats["reduced"] = print_formula(el)
    if out.sat:
        out.stats["witness_checks_original"] = model_check(out.witness, out.witness.designated, f, ctx)
    return out


# -- brute-force oracle --------------------------------------------------------

def _transitive_matrices(n: int) -> np.ndarray:
    """All transitive n x n boolean relations, shape (count, n, n)."""
    out = []
    for bits in itertools.product((False, True), repeat=n * n):
        r = np.array(bits, dtype=bool).reshape(n, n)
        comp = (r.astype(np.uint8) @ r.astype(np.uint8)) > 0
        if not (comp & ~r).any():
            out.append(r)
    return np.array(out, dtype=bool).reshape(-1, n, n)


_TRANS_CACHE: dict[int, np.ndarray] = {}


def transitive_relations(n: int) -> np.ndarray:
    if n not in _TRANS_CACHE:
        _TRANS_CACHE[n] = _transitive_matrices(n)
    return _TRANS_CACHE[n]


def _eval_batch(f: Formula, rels: dict, vals: np.ndarray, fluent_index: dict, n: int):
    """Truth table of ``f``: shape (frames, valuations, worlds)."""
    F = next(iter(rels.values())).shape[0] if rels else 1
    V = vals.shape[0]
    memo = {}

    def ev(g):
        if g in memo:
            return memo[g]
        if isinstance(g, Top):
            out = np.ones((F, V, n), dtype=bool)
        elif isinstance(g, Atom):
            out = np.broadcast_to(vals[None, :, fluent_index[g.key], :], (F, V, n))
        elif isinstance(g, Not):
            out = ~ev(g.sub)
        elif isinstance(g, And):
            out = ev(g.left) & ev(g.right)
        elif isinstance(g, Possible):
            r = rels[g.agent].astype(np.uint8)  # (F, n, n)
            body = ev(g.sub).astype(np.uint8)  # (F, V, n)
            out = (body @ r.transpose(0, 2, 1)) > 0
        else:
            raise NotEL(f"oracle handles EL only: {g!r}")
        memo[g] = out
        return out

    return ev(f)


@dataclass
class OracleResult:
    sat: bool
    bound: int
    witness: KripkeModel | None = None

    @property
    def verdict(self) -> str:
        return SAT if self.sat else f"NO-MODEL-UP-TO-{self.bound}"


def brute_force_sat(f: Formula, max_worlds: int = 3, cells: int = 1 << 21) -> OracleResult:
    """Exhaustive search over transitive models with at most ``max_worlds`` worlds.

    Agents and fluents are those occurring in ``f``.  Sound for SAT and
    complete up to the bound.  ``cells`` caps the size of each truth table
    batch.
    """
    if not is_el(f):
        raise NotEL("brute_force_sat needs an update-free formula")
    agent_list = sorted(agents_of(f))
    fluents = sorted({a.key for a in atoms(f)})
    fluent_index = {p: i for i, p in enumerate(fluents)}
    for n in range(1, max_worlds + 1):
        trans = transitive_relations(n)
        k = len(fluents)
        # valuations: (V, k, n)
        vbits = np.array(list(itertools.product((False, True), repeat=k * n)), dtype=bool)
        vals = vbits.reshape(-1, k, n) if k else np.zeros((1, 0, n), dtype=bool)
        chunk = max(1, cells // (len(vals) * n))
        combos = itertools.product(range(len(trans)), repeat=len(agent_list))
        while True:
            batch = list(itertools.islice(combos, chunk))
            if not batch:
                break
            idx = np.array(batch, dtype=np.int64).reshape(len(batch), len(agent_list))
            rels = {a: trans[idx[:, j]] for j, a in enumerate(agent_list)}
            table = _eval_batch(f, rels, vals, fluent_index, n)
            if table.shape[0] != len(batch):
                table = np.broadcast_to(table, (len(batch),) + table.shape[1:])
            hits = np.argwhere(table)
            if len(hits):
                fi, vi, si = hits[0]
                worlds = [f"w{i}" for i in range(n)]
                relations = {
                    a: {(worlds[x], worlds[y]) for x, y in np.argwhere(rels[a][fi])}
                    for a in agent_list
                }
                valuation = {p: {worlds[s] for s in range(n) if vals[vi, j, s]}
                             for p, j in fluent_index.items()}
                w = KripkeModel(frozenset(worlds), relations, valuation, worlds[si])
                return OracleResult(True, n, w)
    return OracleResult(False, max_worlds)
