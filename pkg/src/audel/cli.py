"""Command-line entry point: ``audel <command> ...``.

Exit status: 0 on success (or a true / SAT answer), 1 on a false / UNSAT
answer or failed checks, 2 on usage or data errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .frames import FrameError, load_frame, validate_frame
from .model import ModelError, load_model, model_to_dict, save_model, to_dot, validate
from .reduction import ReductionBudgetExceeded, reduce_to_el
from .satsolver import NotEL, brute_force_sat, sat_del
from .semantics import EvalContext, UnresolvedFrame, model_check
from .syntax import FormulaSyntaxError, SignatureError, is_el, parse_formula, print_formula
from .testkit import (
    LANGUAGES, GenConfig, ScenarioError, bundled_scenarios, gen_formula, gen_frame,
    gen_frames, gen_model, load_scenario, resolve_scenario, run_scenario,
)
from .update import product_update, sum_product_update

DATA_ERRORS = (ModelError, FrameError, FormulaSyntaxError, SignatureError, UnresolvedFrame,
               ScenarioError, NotEL, ReductionBudgetExceeded, OSError)


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("AUDEL_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"AUDEL_SEED must be an integer, got {raw!r}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _ctx(frames: str | None, fallback: Path | None = None) -> EvalContext:
    directory = Path(frames) if frames else (fallback or Path.cwd())
    if not directory.is_dir():
        raise UsageError(f"--frames {directory} is not a directory")
    return EvalContext(directory=directory)


def _pointed(spec: str) -> tuple[Path, str]:
    path, sep, event = spec.rpartition("@")
    if not sep or not path or not event:
        raise UsageError(f"expected frame.json@event, got {spec!r}")
    return Path(path), event


def cmd_check(args) -> int:
    m = load_model(args.model)
    ctx = _ctx(args.frames, Path(args.model).resolve().parent)
    world = args.world or m.designated
    if world is None:
        raise UsageError("the model has no designated world; pass --world")
    value = model_check(m, world, parse_formula(args.formula), ctx)
    print("true" if value else "false")
    return 0 if value else 1


def cmd_update(args) -> int:
    m = load_model(args.model)
    world = m.designated
    for spec in args.update:
        path, event = _pointed(spec)
        U = load_frame(path)
        problems = validate_frame(U)
        if problems:
            raise FrameError(f"{path}: {', '.join(map(str, problems))}")
        if event not in U.events:
            raise FrameError(f"{path}: no event {event!r}")
        if world is not None and not model_check(m, world, U.precondition(event)):
            print(f"precondition of {path.stem}@{event} fails at {world}", file=sys.stderr)
            return 1
        res = product_update(m, U) if args.product else sum_product_update(m, U)
        world = res.world(world, event) if world is not None else None
        m = res.model.with_designated(world) if world is not None else res.model
    if args.output:
        save_model(m, args.output)
        print(f"wrote {len(m.worlds)} worlds to {args.output}", file=sys.stderr)
    else:
        _emit(model_to_dict(m))
    return 0


def cmd_reduce(args) -> int:
    ctx = _ctx(args.frames)
    el, trace = reduce_to_el(parse_formula(args.formula), ctx, budget=args.budget)
    if args.trace:
        for entry in trace:
            print(json.dumps(entry.to_json()))
        print(json.dumps({"result": print_formula(el), "steps": len(trace)}))
    else:
        print(print_formula(el))
    return 0


def cmd_sat(args) -> int:
    ctx = _ctx(args.frames)
    f = parse_formula(args.formula)
    if args.oracle is not None:
        el = f if is_el(f) else reduce_to_el(f, ctx)[0]
        res = brute_force_sat(el, args.oracle)
        print(res.verdict)
        witness = res.witness
    else:
        out = sat_del(f, ctx)
        print(out.verdict)
        witness = out.witness
        print(json.dumps(out.stats), file=sys.stderr)
    if witness is not None:
        if args.witness:
            save_model(witness, args.witness)
        else:
            _emit(model_to_dict(witness))
    return 0 if witness is not None else 1


def cmd_soundness(args) -> int:
    from .proofkit import soundness_suite

    seed = args.seed if args.seed is not None else default_seed()
    cfg = GenConfig(max_worlds=args.max_worlds, max_agents=args.max_agents,
                    max_events=args.max_events, seed=seed)
    report = soundness_suite(args.trials, seed, cfg, workers=args.workers)
    _emit(report)
    return 0 if report["failed_trials"] == 0 else 1


def cmd_scenario(args) -> int:
    if args.action == "list":
        for name, path in bundled_scenarios().items():
            print(f"{name}\t{path}")
        return 0
    if not args.file:
        raise UsageError("scenario run needs a scenario file or bundled name")
    report = run_scenario(load_scenario(resolve_scenario(args.file)))
    if args.json:
        _emit(report.to_json())
    else:
        for r in report.results:
            status = "PASS" if r.passed else "FAIL"
            detail = r.error or f"expected {str(r.expected).lower()}, got {str(r.actual).lower()}"
            print(f"{status} step {r.step} @ {r.world}: {r.formula} ({detail})")
        for s in report.structure:
            status = "PASS" if s["passed"] else "FAIL"
            print(f"{status} {s['set']}({s['frame']}@{s['event']}) = {s['actual']} "
                  f"(expected {s['expected']})")
        if report.error:
            print(f"ERROR {report.error}")
        print(f"{report.name}: {'ok' if report.ok else 'FAILED'}")
    return 0 if report.ok else 1


def cmd_dot(args) -> int:
    m = load_model(args.model)
    print(to_dot(m, Path(args.model).stem), end="")
    return 0


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    cfg = GenConfig(max_worlds=args.max_worlds, max_agents=args.max_agents,
                    max_events=args.max_events, max_depth=args.depth, seed=seed)
    rng = random.Random(seed)
    if args.kind == "model":
        m = gen_model(cfg, rng)
        assert not validate(m)
        _emit(model_to_dict(m))
    elif args.kind == "frame":
        from .frames import frame_to_dict

        _emit(frame_to_dict(gen_frame(cfg, rng)))
    else:
        ctx = EvalContext()
        if args.language != "EL":
            gen_frames(cfg, ctx, rng)
        f = gen_formula(cfg, args.language, ctx, rng)
        if args.frames_out and ctx.frames:
            from .frames import frame_to_dict

            out = Path(args.frames_out)
            out.mkdir(parents=True, exist_ok=True)
            for name, U in ctx.frames.items():
                (out / f"{name}.json").write_text(json.dumps(frame_to_dict(U), indent=2) + "\n")
        print(print_formula(f))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="audel", description="Dynamic epistemic logic with agent addition and deletion.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="model-check a formula")
    c.add_argument("-m", "--model", required=True)
    c.add_argument("-f", "--formula", required=True)
    c.add_argument("--frames", help="directory of frame files (default: the model's directory)")
    c.add_argument("--world", help="world to evaluate at (default: designated)")
    c.set_defaults(func=cmd_check)

    u = sub.add_parser("update", help="apply update frames to a model")
    u.add_argument("-m", "--model", required=True)
    u.add_argument("-u", "--update", action="append", required=True, metavar="FRAME.json@EVENT")
    u.add_argument("-o", "--output")
    u.add_argument("--product", action="store_true", help="plain product update (action frames only)")
    u.set_defaults(func=cmd_update)

    r = sub.add_parser("reduce", help="rewrite a formula into update-free form")
    r.add_argument("-f", "--formula", required=True)
    r.add_argument("--frames")
    r.add_argument("--trace", action="store_true", help="emit each rewrite step as a JSON line")
    r.add_argument("--budget", type=int, default=100_000)
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("sat", help="decide satisfiability over transitive frames")
    s.add_argument("-f", "--formula", required=True)
    s.add_argument("--frames")
    s.add_argument("--witness", help="write the witness model here")
    s.add_argument("--oracle", type=int, metavar="N", help="use brute-force search up to N worlds")
    s.set_defaults(func=cmd_sat)

    sd = sub.add_parser("soundness", help="random soundness trials of the axiom schemas")
    sd.add_argument("--trials", type=int, default=1000)
    sd.add_argument("--seed", type=int)
    sd.add_argument("--workers", type=int, default=1)
    sd.add_argument("--max-worlds", type=int, default=5)
    sd.add_argument("--max-agents", type=int, default=3)
    sd.add_argument("--max-events", type=int, default=3)
    sd.set_defaults(func=cmd_soundness)

    sc = sub.add_parser("scenario", help="run or list scenario files")
    sc.add_argument("action", choices=("run", "list"))
    sc.add_argument("file", nargs="?")
    sc.add_argument("--json", action="store_true")
    sc.set_defaults(func=cmd_scenario)

    d = sub.add_parser("dot", help="render a model in Graphviz DOT")
    d.add_argument("-m", "--model", required=True)
    d.set_defaults(func=cmd_dot)

    g = sub.add_parser("gen", help="generate random models, frames or formulas")
    g.add_argument("kind", choices=("model", "frame", "formula"))
    g.add_argument("--seed", type=int)
    g.add_argument("--language", choices=LANGUAGES, default="EL")
    g.add_argument("--max-worlds", type=int, default=5)
    g.add_argument("--max-agents", type=int, default=3)
    g.add_argument("--max-events", type=int, default=3)
    g.add_argument("--depth", type=int, default=3)
    g.add_argument("--frames-out", help="directory to write generated frames for update formulas")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"audel: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"audel: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    except DATA_ERRORS + (ValueError,) as exc:
        print(f"audel: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
