"""Concrete instances of the DEL axiom schemas and inference rules.

Schema ids are the integers 1 to 13, where 10, 11 and 12 are the rules
``MP``, ``NEC-B`` and ``NEC-U``, plus ``DIST-IFF`` for distributivity of
bi-implication under a box update.  :func:`soundness_suite` checks random
instances on random transitive models.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .frames import add_set, del_set, observers
from .model import model_to_dict
from .semantics import EvalContext, extension
from .syntax import (
    BOT, TOP, And, Atom, Belief, BoxUpdate, DiamondUnion, DiamondUpdate, Formula, Iff,
    Implies, Not, Or, Possible, disj, print_formula,
)
from .testkit import FRESH_AGENTS, GenConfig, gen_el, gen_formula, gen_frame, gen_model

RULES = {10: "MP", 11: "NEC-B", 12: "NEC-U"}
SCHEMAS: tuple = (1, 2, 3, 4, 5, 6, 7, 8, 9, "MP", "NEC-B", "NEC-U", 13, "DIST-IFF")


class SideConditionError(ValueError):
    pass


class MissingBinding(KeyError):
    pass


def _t_k(p, q, r):
    return Implies(p, Implies(q, p))


def _t_s(p, q, r):
    return Implies(Implies(p, Implies(q, r)), Implies(Implies(p, q), Implies(p, r)))


def _t_contra(p, q, r):
    return Implies(Implies(Not(p), Not(q)), Implies(q, p))


def _t_peirce(p, q, r):
    return Implies(Implies(Implies(p, q), p), p)


def _t_lem(p, q, r):
    return Or(p, Not(p))


def _t_dneg(p, q, r):
    return Iff(Not(Not(p)), p)


def _t_comm(p, q, r):
    return Iff(And(p, q), And(q, p))


def _t_demorgan(p, q, r):
    return Iff(Not(And(p, q)), Or(Not(p), Not(q)))


TAUTOLOGIES: dict[str, Callable[[Formula, Formula, Formula], Formula]] = {
    "K": _t_k,
    "S": _t_s,
    "contraposition": _t_contra,
    "peirce": _t_peirce,
    "excluded-middle": _t_lem,
    "double-negation": _t_dneg,
    "and-commutes": _t_comm,
    "de-morgan": _t_demorgan,
}


def normalize_schema(schema) -> int | str:
    if isinstance(schema, str) and schema.isdigit():
        schema = int(schema)
    if isinstance(schema, int) and schema in RULES:
        return RULES[schema]
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}")
    return schema


def _need(b: Mapping, *keys):
    missing = [k for k in keys if b.get(k) is None]
    if missing:
        raise MissingBinding(f"missing binding(s): {', '.join(missing)}")
    return [b[k] for k in keys]


def instantiate_rule(tag, b: Mapping, ctx: EvalContext | None = None) -> tuple[list[Formula], Formula]:
    """Premises and conclusion of an inference rule."""
    tag = normalize_schema(tag)
    if tag == "MP":
        phi, psi = _need(b, "phi", "psi")
        return [phi, Implies(phi, psi)], psi
    if tag == "NEC-B":
        phi, a = _need(b, "phi", "a")
        return [phi], Belief(a, phi)
    if tag == "NEC-U":
        phi, name, u = _need(b, "phi", "frame", "event")
        if ctx is not None:
            ctx.frame(name).precondition(u)
        return [phi], BoxUpdate(name, u, phi)
    raise ValueError(f"{tag!r} is an axiom, not a rule")


def instantiate_axiom(schema, b: Mapping, ctx: EvalContext | None = None) -> Formula:
    """The closed formula for ``schema`` under bindings ``b``.

    Binding keys: ``phi``, ``psi``, ``chi`` (formulas), ``a`` (agent),
    ``frame`` and ``event`` (a pointed frame resolvable in ``ctx``),
    ``p`` (an atom), ``pointed`` (a sequence of (frame, event) pairs) and
    ``template`` (a name from :data:`TAUTOLOGIES`).  For rules the
    conclusion is returned.
    """
    schema = normalize_schema(schema)
    if schema in ("MP", "NEC-B", "NEC-U"):
        return instantiate_rule(schema, b, ctx)[1]
    if schema == 1:
        name, phi = _need(b, "template", "phi")
        if name not in TAUTOLOGIES:
            raise ValueError(f"unknown tautology template {name!r}")
        return TAUTOLOGIES[name](phi, b.get("psi") or TOP, b.get("chi") or TOP)
    if schema == 2:
        a, phi, psi = _need(b, "a", "phi", "psi")
        return Implies(Belief(a, Implies(phi, psi)), Implies(Belief(a, phi), Belief(a, psi)))
    if schema == 3:
        a, phi = _need(b, "a", "phi")
        return Implies(Belief(a, phi), Belief(a, Belief(a, phi)))
    if schema == 13:
        (pointed, phi) = _need(b, "pointed", "phi")
        pointed = tuple(tuple(x) for x in pointed)
        if len(pointed) < 2:
            raise ValueError("a union needs at least two pointed frames")
        return Iff(DiamondUnion(pointed, phi), disj(*(DiamondUpdate(U, u, phi) for U, u in pointed)))

    name, u = _need(b, "frame", "event")
    if ctx is None:
        raise ValueError(f"schema {schema} needs an EvalContext to resolve {name!r}")
    U = ctx.frame(name)
    pre = U.precondition(u)

    def dia(v, g):
        return DiamondUpdate(name, v, g)

    if schema == 4:
        phi, psi = _need(b, "phi", "psi")
        box = lambda g: BoxUpdate(name, u, g)  # noqa: E731
        return Implies(box(Implies(phi, psi)), Implies(box(phi), box(psi)))
    if schema == "DIST-IFF":
        phi, psi = _need(b, "phi", "psi")
        box = lambda g: BoxUpdate(name, u, g)  # noqa: E731
        return Implies(box(Iff(phi, psi)), Iff(box(phi), box(psi)))
    if schema == 5:
        (p,) = _need(b, "p")
        if not isinstance(p, Atom):
            raise ValueError("schema 5 binds p to an atom")
        eff = U.postcondition(u, p.key)
        if eff is None:
            rhs = And(pre, p) if pre != TOP else p
        else:
            rhs = pre if eff else BOT
        return Iff(dia(u, p), rhs)
    if schema == 6:
        (phi,) = _need(b, "phi")
        return Iff(dia(u, Not(phi)), And(pre, Not(dia(u, phi))))
    if schema == 7:
        phi, psi = _need(b, "phi", "psi")
        return Iff(dia(u, Or(phi, psi)), Or(dia(u, phi), dia(u, psi)))
    if schema in (8, 9):
        a, phi = _need(b, "a", "phi")
        added = a in add_set(U, u) - del_set(U, u)
        if schema == 8:
            if added:
                raise SideConditionError(f"schema 8 needs {a} outside Add({u}) minus Del({u})")
            rhs = disj(*(Possible(a, dia(v, phi)) for v in sorted(U.obs_successors(a, u))
                         if v not in U.del_successors(a, u)))
        else:
            if not added:
                raise SideConditionError(f"schema 9 needs {a} in Add({u}) minus Del({u})")
            rhs = disj(*(
                [Possible(a, dia(v, phi)) for v in sorted(U.obs_successors(a, u))]
                + [dia(w, phi) for w in sorted(U.add_successors(a, u))]
                + [Possible(c, dia(u, phi)) for c in sorted(observers(U, u))]
            ))
        return Iff(dia(u, Possible(a, phi)), And(pre, rhs))
    raise ValueError(f"unknown schema {schema!r}")


# -- soundness suite ---------------------------------------------------------

@dataclass
class TrialResult:
    index: int
    schema: int | str
    instance: str
    falsifying_worlds: list[str] = field(default_factory=list)
    vacuous: bool = False
    model: dict | None = None
    frames: dict | None = None


def _pick_agent(rng: random.Random, cfg: GenConfig, U, u, want_added: bool) -> str | None:
    added = sorted(add_set(U, u) - del_set(U, u))
    if want_added:
        return rng.choice(added) if added else None
    rest = [a for a in cfg.agents + FRESH_AGENTS if a not in added]
    return rng.choice(rest) if rest else None


def _bindings(schema, rng: random.Random, cfg: GenConfig, ctx: EvalContext) -> dict:
    sub = GenConfig(**{**cfg.__dict__, "max_depth": max(1, cfg.max_depth - 1)})
    form = lambda: gen_formula(sub, rng.choice(("EL", "DEL-")), ctx, rng)  # noqa: E731
    b = {"phi": form(), "psi": form(), "chi": form(),
         "a": rng.choice(cfg.agents + FRESH_AGENTS),
         "p": gen_el(sub, 0, rng) , "template": rng.choice(sorted(TAUTOLOGIES))}
    while not isinstance(b["p"], Atom):
        b["p"] = gen_el(sub, 0, rng)
    names = sorted(ctx.frames)
    name = rng.choice(names)
    U = ctx.frame(name)
    b["frame"], b["event"] = name, rng.choice(U.events)
    if schema in (8, 9):
        for _ in range(50):
            a = _pick_agent(rng, cfg, U, b["event"], schema == 9)
            if a is not None:
                b["a"] = a
                break
            name = f"F{len(ctx.frames)}"
            ctx.register(name, gen_frame(cfg, rng, name))
            U = ctx.frame(name)
            b["frame"], b["event"] = name, rng.choice(U.events)
    b["pointed"] = [(n, rng.choice(ctx.frame(n).events))
                    for n in (rng.choice(names) for _ in range(rng.randint(2, 3)))]
    return b


def sample_instance(schema, seed: int, cfg: GenConfig | None = None) -> tuple[Formula, EvalContext]:
    """A random instance of an axiom schema with the frames it mentions.

    Rule ids give the rule's conclusion, built from random bindings.
    """
    cfg = cfg or GenConfig()
    rng = random.Random(seed)
    ctx = EvalContext()
    from .testkit import gen_frames

    gen_frames(cfg, ctx, rng)
    schema = normalize_schema(schema)
    return instantiate_axiom(schema, _bindings(schema, rng, cfg, ctx), ctx), ctx


def _valid_on(m, f, ctx) -> list[str]:
    return sorted(m.worlds - extension(m, f, ctx))


def run_trial(index: int, schema, seed: int, cfg: GenConfig) -> TrialResult:
    """One random (schema, bindings, model) check."""
    rng = random.Random(seed)
    ctx = EvalContext()
    from .testkit import gen_frames

    gen_frames(cfg, ctx, rng)
    m = gen_model(cfg, rng)
    schema = normalize_schema(schema)
    b = _bindings(schema, rng, cfg, ctx)
    vacuous = False
    if schema in ("MP", "NEC-B", "NEC-U"):
        # premise: an axiom instance drawn from the non-rule schemas
        axiom = rng.choice([s for s in SCHEMAS if s not in ("MP", "NEC-B", "NEC-U", 8, 9)])
        b["phi"] = instantiate_axiom(axiom, _bindings(axiom, rng, cfg, ctx), ctx)
        if schema == "MP" and rng.random() < 0.5:
            b["psi"] = Or(b["chi"], b["phi"])
        premises, conclusion = instantiate_rule(schema, b, ctx)
        if all(not _valid_on(m, p, ctx) for p in premises):
            bad = _valid_on(m, conclusion, ctx)
        else:
            bad, vacuous = [], True
        text = f"{' ; '.join(print_formula(p) for p in premises)} => {print_formula(conclusion)}"
    else:
        f = instantiate_axiom(schema, b, ctx)
        bad = _valid_on(m, f, ctx)
        text = print_formula(f)
    res = TrialResult(index, schema, text, bad, vacuous)
    if bad:
        from .frames import frame_to_dict

        res.model = model_to_dict(m)
        res.frames = {n: frame_to_dict(U) for n, U in sorted(ctx.frames.items())}
    return res


def trial_seeds(seed: int, trials: int) -> list[int]:
    """Independent per-trial seeds derived from the master seed."""
    children = np.random.SeedSequence(seed).spawn(trials)
    return [int(c.generate_state(1)[0]) for c in children]


def _run(args):
    return run_trial(*args)


def soundness_suite(
    trials: int = 1000,
    seed: int = 0,
    cfg: GenConfig | None = None,
    schemas=SCHEMAS,
    workers: int = 1,
    max_reported: int = 20,
) -> dict:
    """Check ``trials`` random instances, cycling through ``schemas``.

    Returns a JSON-serialisable report.  ``failures`` lists falsified
    instances (up to ``max_reported`` with their models).
    """
    cfg = cfg or GenConfig()
    schemas = [normalize_schema(s) for s in schemas]
    seeds = trial_seeds(seed, trials)
    jobs = [(i, schemas[i % len(schemas)], seeds[i], cfg) for i in range(trials)]
    t0 = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run, jobs, chunksize=16))
    else:
        results = [run_trial(*j) for j in jobs]
    by_schema: dict[str, dict] = {}
    failures = []
    for r in results:
        s = by_schema.setdefault(str(r.schema), {"trials": 0, "failures": 0, "falsifying_worlds": 0, "vacuous": 0})
        s["trials"] += 1
        s["vacuous"] += r.vacuous
        if r.falsifying_worlds:
            s["failures"] += 1
            s["falsifying_worlds"] += len(r.falsifying_worlds)
            if len(failures) < max_reported:
                failures.append({"trial": r.index, "schema": r.schema, "instance": r.instance,
                                 "worlds": r.falsifying_worlds, "model": r.model, "frames": r.frames})
    return {
        "trials": trials,
        "seed": seed,
        "elapsed_s": round(time.perf_counter() - t0, 3),
        "failed_trials": sum(s["failures"] for s in by_schema.values()),
        "falsifying_worlds": sum(s["falsifying_worlds"] for s in by_schema.values()),
        "by_schema": by_schema,
        "failures": failures,
    }
