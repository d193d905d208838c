"""Truth of DEL formulas at worlds of Kripke models.

Update modalities are evaluated on the eagerly built sum-product model,
memoised per (model, frame) in an :class:`EvalContext`.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Mapping

from .frames import AgentUpdateFrame, load_frame
from .model import KripkeModel, compose_world
from .syntax import And, Atom, DiamondUnion, DiamondUpdate, Formula, Not, Possible, Top


class UnresolvedFrame(KeyError):
    pass


class EvalContext:
    """Frame library plus the update memo.

    ``frames`` maps names to frames; with ``directory`` set, unknown names
    are loaded lazily from ``<directory>/<name>.json``.
    """

    def __init__(
        self,
        frames: Mapping[str, AgentUpdateFrame] | None = None,
        directory: str | Path | None = None,
        memo: bool = True,
    ):
        self.frames = dict(frames or {})
        self.directory = Path(directory) if directory is not None else None
        self.memo_enabled = memo
        self._memo: dict[tuple[int, str], tuple[KripkeModel, object]] = {}
        self._lock = threading.Lock()

    def frame(self, name: str) -> AgentUpdateFrame:
        if name not in self.frames:
            if self.directory is not None and (self.directory / f"{name}.json").exists():
                self.frames[name] = load_frame(self.directory / f"{name}.json", name)
            else:
                raise UnresolvedFrame(f"unresolved frame reference {name!r}")
        return self.frames[name]

    def register(self, name: str, frame: AgentUpdateFrame) -> None:
        self.frames[name] = frame

    def updated(self, m: KripkeModel, name: str):
        from .update import sum_product_update

        U = self.frame(name)
        if not self.memo_enabled:
            return sum_product_update(m, U)
        key = (id(m), name)
        hit = self._memo.get(key)
        # the stored model reference pins id(m)
        if hit is not None and hit[0] is m:
            return hit[1]
        res = sum_product_update(m, U)
        with self._lock:
            self._memo[key] = (m, res)
        return res

    def clear(self) -> None:
        with self._lock:
            self._memo.clear()


def extension(m: KripkeModel, f: Formula, ctx: EvalContext | None = None) -> frozenset[str]:
    """The set of worlds of ``m`` where ``f`` holds."""
    ctx = ctx if ctx is not None else EvalContext()
    cache: dict[Formula, frozenset[str]] = {}
    return _ext(m, f, ctx, cache)


def _ext(m: KripkeModel, f: Formula, ctx: EvalContext, cache: dict) -> frozenset[str]:
    hit = cache.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Top):
        out = m.worlds
    elif isinstance(f, Atom):
        out = m.valuation.get(f.key, frozenset()) & m.worlds
    elif isinstance(f, Not):
        out = m.worlds - _ext(m, f.sub, ctx, cache)
    elif isinstance(f, And):
        out = _ext(m, f.left, ctx, cache) & _ext(m, f.right, ctx, cache)
    elif isinstance(f, Possible):
        body = _ext(m, f.sub, ctx, cache)
        out = frozenset(s for s in m.worlds if not m.successors(f.agent, s).isdisjoint(body))
    elif isinstance(f, DiamondUpdate):
        out = _update_ext(m, f.frame, f.event, f.sub, ctx)
    elif isinstance(f, DiamondUnion):
        out = frozenset().union(*(_update_ext(m, U, u, f.sub, ctx) for U, u in f.pointed))
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[f] = out
    return out


def _update_ext(m: KripkeModel, name: str, event: str, body: Formula, ctx: EvalContext):
    U = ctx.frame(name)
    pre = _ext(m, U.precondition(event), ctx, {})
    if not pre:
        return frozenset()
    res = ctx.updated(m, name)
    inner = _ext(res.model, body, ctx, {})
    out = set()
    for s in pre:
        w = compose_world(s, event)
        assert w in res.model.worlds, f"{w} missing although pre({event}) holds"
        if w in inner:
            out.add(s)
    return frozenset(out)


def model_check(m: KripkeModel, s: str, f: Formula, ctx: EvalContext | None = None) -> bool:
    if s not in m.worlds:
        raise KeyError(f"unknown world {s!r}")
    return s in extension(m, f, ctx)


def check_validity_on(m: KripkeModel, f: Formula, ctx: EvalContext | None = None) -> bool:
    """Whether ``f`` holds at every world of ``m``."""
    return extension(m, f, ctx) == m.worlds


def satisfying_worlds(m: KripkeModel, f: Formula, ctx: EvalContext | None = None) -> list[str]:
    return sorted(extension(m, f, ctx))
