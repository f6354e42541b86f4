"""Command-line front end: generate, validate, build, route, measure, render."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .builder import ThetaGraph, build
from .errors import DomainError, InvalidInstance
from .geom import FAMILIES, parse_rational
from .pslg import Instance, validate

EXIT_OK, EXIT_FOUND, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_instance(path: str | None) -> Instance:
    text = _read(path)
    try:
        return Instance.from_json(text)
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise InvalidInstance(f"malformed instance JSON: {exc}") from exc


def _load_graph(path: str, inst: Instance) -> ThetaGraph:
    data = json.loads(_read(path))
    fresh = build(inst, data["family"])
    if sorted(map(list, fresh.edges)) != sorted(data["edges"]):
        raise InvalidInstance("graph file does not match the instance")
    return fresh


def _endpoints(args) -> tuple[int, int]:
    s, t = args.s, args.t
    if (s is None or t is None) and args.sidecar:
        side = json.loads(_read(args.sidecar))
        s = side["s"] if s is None else s
        t = side["t"] if t is None else t
    if s is None or t is None:
        raise UsageError("--s and --t (or --sidecar) are required")
    return s, t


def _check_index(inst: Instance, *ids: int) -> None:
    for i in ids:
        if not 0 <= i < inst.n:
            raise UsageError(f"vertex {i} out of range 0..{inst.n - 1}")


# ---------------------------------------------------------------------------
# verbs


def cmd_generate(args) -> int:
    from . import instances as gen

    designated = None
    if args.kind == "grid":
        designated = gen.gen_lower_bound_grid(gen.GridParams(args.n or 16, args.epsilon, args.seed))
        inst = designated.instance
    elif args.kind == "worstcase":
        params = gen.WorstCaseParams(args.alpha, args.epsilon, args.st_length)
        designated = gen.gen_negative_worst_case(params, doublings=args.doublings)
        inst = designated.instance
    else:
        inst = gen.gen_random(args.n or 50, args.fraction, args.seed)
    _write(args.output, inst.to_json() + "\n")
    if designated is not None:
        sidecar = args.sidecar
        if sidecar is None and args.output not in (None, "-"):
            out = Path(args.output)
            sidecar = str(out.with_name(out.stem + ".sidecar.json"))
        if sidecar is not None:
            _write(sidecar, designated.sidecar_json() + "\n")
        else:
            sys.stderr.write(designated.sidecar_json() + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _load_instance(args.input)
    bad = validate(inst)
    _write(args.output, json.dumps([v.to_dict() for v in bad], indent=1) + "\n")
    return EXIT_FOUND if bad else EXIT_OK


def cmd_build(args) -> int:
    inst = _load_instance(args.input)
    _write(args.output, build(inst, args.family).to_json() + "\n")
    return EXIT_OK


def cmd_route(args) -> int:
    from .router_negative import route_negative
    from .router_positive import route_positive, route_theta6

    inst = _load_instance(args.input)
    s, t = _endpoints(args)
    _check_index(inst, s, t)
    if args.algo == "theta6":
        res = route_theta6(inst, build(inst, "theta6"), s, t)
        out = res.trace.to_dict()
        out["evaluations"] = [[u, v, verdict] for u, v, verdict in res.evaluations]
    elif args.algo == "negative":
        out = route_negative(inst, build(inst, args.family), s, t).to_dict()
    else:
        out = route_positive(inst, build(inst, args.family), s, t).to_dict()
    _write(args.output, json.dumps(out, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_measure(args) -> int:
    from .instances import gen_random
    from .oracles import measure

    if args.input:
        suite = [_load_instance(args.input)]
    else:
        suite = [gen_random(args.n or 50, args.fraction, args.seed + i) for i in range(args.instances)]
    lines = []
    for inst in suite:
        for rep in measure(inst, args.suite, family=args.family, seed=args.seed, max_pairs=args.max_pairs):
            row = rep.to_dict()
            row["instance"] = inst.name
            lines.append(json.dumps(row, sort_keys=True))
    _write(args.output, "".join(line + "\n" for line in lines))
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import render_svg

    inst = _load_instance(args.input)
    graph = route = s = t = None
    if args.what in ("graph", "trace"):
        graph = _load_graph(args.graph, inst) if args.graph else build(inst, args.family)
    if args.what == "trace":
        if not args.trace:
            raise UsageError("--what trace needs --trace")
        data = json.loads(_read(args.trace))
        route, s, t = data["vertices"], data["s"], data["t"]
        _check_index(inst, s, t, *route)
    elif args.s is not None and args.t is not None:
        s, t = args.s, args.t
        _check_index(inst, s, t)
    _write(args.output, render_svg(inst, graph=graph, route=route, s=s, t=t))
    return EXIT_OK


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetaroute", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", "-i", help="instance JSON (default: stdin)")
        sp.add_argument("--output", "-o", help="output path (default: stdout)")

    g = sub.add_parser("generate", help="write an instance JSON")
    common(g, needs_input=False)
    g.add_argument("--kind", choices=("grid", "worstcase", "random"), required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--fraction", type=_rational, default=Fraction(0), help="constraint fraction (random)")
    g.add_argument("--alpha", type=_rational, default=Fraction(2425, 10000))
    g.add_argument("--epsilon", type=_rational, default=Fraction(1, 1000))
    g.add_argument("--st-length", type=_rational, default=Fraction(1))
    g.add_argument("--doublings", type=int, default=8, help="worst case: log2 of the final search budget")
    g.add_argument("--sidecar", help="where to write the designated s/t sidecar")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="list violations; exit 1 if any")
    common(v)
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("build", help="write the graph JSON")
    common(b)
    b.add_argument("--family", choices=FAMILIES, default="half_plus")
    b.set_defaults(func=cmd_build)

    r = sub.add_parser("route", help="route one message and write its trace")
    common(r)
    r.add_argument("--algo", choices=("positive", "theta6", "negative"), required=True)
    r.add_argument("--family", choices=("half_plus", "half_minus"), default="half_plus")
    r.add_argument("--s", type=int)
    r.add_argument("--t", type=int)
    r.add_argument("--sidecar", help="take s and t from a generator sidecar")
    r.set_defaults(func=cmd_route)

    m = sub.add_parser("measure", help="routing ratios as JSON lines")
    m.add_argument("--input", "-i", help="instance JSON; omit to measure a random suite")
    m.add_argument("--output", "-o")
    m.add_argument("--suite", choices=("positive", "theta6", "negative"), default="positive")
    m.add_argument("--family", choices=("half_plus", "half_minus"), default="half_plus")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--n", type=int)
    m.add_argument("--fraction", type=_rational, default=Fraction(0))
    m.add_argument("--instances", type=int, default=1)
    m.add_argument("--max-pairs", type=int, default=200)
    m.set_defaults(func=cmd_measure)

    d = sub.add_parser("render", help="draw an instance, graph or trace as SVG")
    common(d)
    d.add_argument("--what", choices=("instance", "graph", "trace"), default="instance")
    d.add_argument("--family", choices=FAMILIES, default="half_plus")
    d.add_argument("--graph", help="graph JSON (default: build it)")
    d.add_argument("--trace", help="trace JSON written by the route verb")
    d.add_argument("--s", type=int)
    d.add_argument("--t", type=int)
    d.set_defaults(func=cmd_render)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except (json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"InvalidInstance: malformed input: {exc}\n")
        return EXIT_DOMAIN


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:  # reader went away, e.g. piped into head
        sys.stderr.close()
        code = EXIT_OK
    sys.exit(code)
