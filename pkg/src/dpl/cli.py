"""Command line interface.  Exit codes: 0 all pass, 1 any fail, 2 error."""

from __future__ import annotations

import argparse
import json
import sys

from dpl.equivalence import dynamic_equivalence
from dpl.errors import DplError
from dpl.formula import parse, render
from dpl.harness import (AuditConfig, UniverseSpec, load_config, random_model, run_audit)
from dpl.model import fixture, load_model, to_json
from dpl.operators import DEFAULT_REGISTRY, load_table
from dpl.postulates import DEFAULT_MAX_BLOCKS, PostulateId, SchemaId, check_schema
from dpl.semantics import DynamicModel, truth_set


def _registry(tables):
    if not tables:
        return DEFAULT_REGISTRY
    reg = DEFAULT_REGISTRY.copy()
    for item in tables:
        name, sep, path = item.partition("=")
        if not sep:
            raise DplError(f"--table expects NAME=FILE, got {item!r}")
        reg.register(load_table(name, path), replace=True)
    return reg


def _model(args):
    if args.model.startswith("fixture:"):
        return fixture(args.model.split(":", 1)[1])
    return load_model(args.model)


def _emit(args, payload: dict, text: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print("\n".join(text))


def cmd_check(args) -> int:
    reg = _registry(args.table)
    d = DynamicModel(_model(args), args.op, reg)
    f = parse(args.formula)
    truth = sorted(truth_set(d, f), key=d.base.worlds.index)
    if args.world is not None:
        d.base.index(args.world)
        ok = args.world in truth
        _emit(args, {"formula": render(f), "world": args.world, "holds": ok},
              [f"{render(f)} {'holds' if ok else 'fails'} at {args.world}"])
    else:
        ok = len(truth) == d.base.n
        _emit(args, {"formula": render(f), "truth_set": truth, "valid": ok},
              [f"{render(f)}", f"true at: {', '.join(truth) or '(none)'}",
               "valid" if ok else "not valid"])
    return 0 if ok else 1


def _split(value):
    return [x for x in (value or "").split(",") if x.strip()]


def cmd_audit(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        if args.output:
            cfg = AuditConfig(**{**cfg.__dict__, "output": args.output})
    else:
        if args.fixture:
            spec = UniverseSpec("fixtures", names=tuple(_split(args.fixture)))
        elif args.models:
            spec = UniverseSpec("models", paths=tuple(args.models))
        elif args.random:
            spec = UniverseSpec("random", args.worlds, tuple(_split(args.atoms)), count=args.random,
                                seed=args.seed)
        elif args.enumerate:
            spec = UniverseSpec("enumerate", args.enumerate, tuple(_split(args.atoms)), args.valuations)
        else:
            raise DplError("audit needs --config or one of --enumerate, --random, --models, --fixture")
        try:
            posts = tuple(PostulateId.parse(x) for x in _split(args.postulates))
            schemas = tuple(SchemaId.parse(x) for x in _split(args.schemas))
        except ValueError as exc:
            raise DplError(str(exc)) from None
        cfg = AuditConfig(
            universe=spec,
            operators=tuple(_split(args.op) or ["rev"]),
            postulates=posts,
            schemas=schemas,
            tables=tuple(tuple(t.split("=", 1)) for t in args.table),
            max_blocks=args.max_blocks,
            max_worlds=args.max_worlds,
            output=args.output,
            jobs=args.jobs,
            seed=args.seed,
        )
    report = run_audit(cfg)
    if args.format == "json":
        print("\n".join(report.lines()))
    else:
        print("\n".join(report.text_lines()))
    return report.exit_code


def cmd_schema(args) -> int:
    reg = _registry(args.table)
    d = DynamicModel(_model(args), args.op, reg)
    try:
        sid = SchemaId.parse(args.schema)
    except ValueError as exc:
        raise DplError(str(exc)) from None
    rep = check_schema(d, sid, n_bound=args.n_bound, max_blocks=args.max_blocks)
    payload = {"check": sid.value, "op": args.op, "model": d.base.key(), "verdict": rep.verdict,
               "instances": rep.stats.get("instances", 0),
               "witness": rep.witnesses[0].to_json() if rep.witnesses else None}
    text = [f"{sid.value} under {args.op}: {rep.verdict} ({payload['instances']} instances)"]
    if rep.witnesses:
        w = rep.witnesses[0]
        text.append(f"  fails at {w.worlds[0]}: {render(w.formula)}")
    _emit(args, payload, text)
    return 0 if rep.passed else 1


def cmd_equiv(args) -> int:
    reg = _registry(args.table)
    d = DynamicModel(_model(args), args.op, reg)
    part = dynamic_equivalence(d)
    blocks = []
    text = []
    for i, b in enumerate(part.blocks):
        names = sorted(b, key=d.base.worlds.index)
        chi = render(part.characteristic(i))
        blocks.append({"worlds": names, "formula": chi})
        text.append(f"{{{', '.join(names)}}}: {chi}")
    _emit(args, {"op": args.op, "model": d.base.key(), "blocks": blocks}, text)
    return 0


def cmd_gen(args) -> int:
    m = random_model(args.worlds, _split(args.atoms), args.seed)
    print(json.dumps(to_json(m), indent=None if args.format == "json" else 2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dpl", description="Dynamic preference logic model checker.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--table", action="append", default=[], metavar="NAME=FILE",
                        help="register a table operator from a JSON file")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", parents=[common], help="evaluate a formula")
    c.add_argument("--model", required=True, help="model file or fixture:NAME")
    c.add_argument("--op", default="rev")
    c.add_argument("--formula", required=True)
    c.add_argument("--world")
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("audit", parents=[common], help="run postulate and schema checks in bulk")
    a.add_argument("--config")
    a.add_argument("--enumerate", type=int, metavar="N", help="all models with 1..N worlds")
    a.add_argument("--random", type=int, metavar="COUNT", help="COUNT random models")
    a.add_argument("--worlds", type=int, default=5, help="world count for --random")
    a.add_argument("--models", nargs="+")
    a.add_argument("--fixture", help="comma separated fixture names")
    a.add_argument("--atoms", default="p")
    a.add_argument("--valuations", choices=("all", "canonical"), default="all")
    a.add_argument("--op", default="rev", help="comma separated operator names")
    a.add_argument("--postulates", default="")
    a.add_argument("--schemas", default="")
    a.add_argument("--max-blocks", type=int, default=DEFAULT_MAX_BLOCKS)
    a.add_argument("--max-worlds", type=int, default=5)
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--output")
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("schema", parents=[common], help="check an axiom schema on one model")
    s.add_argument("--model", required=True)
    s.add_argument("--op", default="rev")
    s.add_argument("--schema", required=True)
    s.add_argument("--n-bound", type=int)
    s.add_argument("--max-blocks", type=int, default=DEFAULT_MAX_BLOCKS)
    s.set_defaults(func=cmd_schema)

    e = sub.add_parser("equiv", parents=[common], help="modal-equivalence blocks of a model")
    e.add_argument("--model", required=True)
    e.add_argument("--op", default="rev")
    e.set_defaults(func=cmd_equiv)

    g = sub.add_parser("gen", parents=[common], help="print a random model")
    g.add_argument("--worlds", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--atoms", default="p,q")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DplError, OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
