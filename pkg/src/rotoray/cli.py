"""Command-line surface tying the pipelines together.

Subcommands: plane, polygon, line, curve, brocard, gen, check, render.
Instances and diagrams travel as JSON on stdin/stdout by default, so stages
pipe into each other.  Exit codes: 0 success, 1 check/equivalence failure,
2 malformed input, 3 degenerate input rejected (the message names the
violated assumption).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import geom
from .diagram import diagram_isomorphic
from .envelope import (INSIDE, OUTSIDE, UNRESTRICTED, CurveDomain,
                       brocard_curve, lower_envelope, partial_functions)
from .errors import RotorayError
from .io import (InstanceError, diagram_to_json, dump_json, envelope_to_json,
                 instance_to_json, load_diagram, load_instance)
from .merge import build_pvd_splitmerge
from .oracle import sample_compare
from .plane import brocard_plane, build_plane_diagram, generate_adversarial
from .polygon import ConvexPolygon, build_pvd_collapse, rays_of_polygon
from .render import render_svg

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_MALFORMED = 2
EXIT_DEGENERATE = 3


def _open_in(path: str | None):
    return sys.stdin if path in (None, "-") else open(path, "r")


def _open_out(path: str | None):
    return sys.stdout if path in (None, "-") else open(path, "w")


def _load(path: str | None) -> dict:
    with _open_in(path) as f:
        return load_instance(f)


def _polygon_of(inst: dict) -> ConvexPolygon:
    if inst["kind"] != "polygon":
        raise InstanceError("this subcommand needs a polygon instance")
    return ConvexPolygon(inst["polygon"])


def cmd_plane(args) -> int:
    inst = _load(args.input)
    if inst["kind"] == "polygon":
        rays = rays_of_polygon(ConvexPolygon(inst["polygon"]))
    else:
        rays = inst["rays"]
    d = build_plane_diagram(rays, strict=args.strict)
    if args.brocard:
        brocard_plane(rays, d)
    with _open_out(args.output) as f:
        dump_json(diagram_to_json(d), f)
    return EXIT_OK


def cmd_polygon(args) -> int:
    inst = _load(args.input)
    P = _polygon_of(inst)
    if args.algo in ("collapse", "both"):
        dc = build_pvd_collapse(P)
    if args.algo in ("splitmerge", "both"):
        ds = build_pvd_splitmerge(P)
    if args.algo == "both":
        if not diagram_isomorphic(dc, ds):
            print("error: collapse and split-merge diagrams differ",
                  file=sys.stderr)
            return EXIT_CHECK_FAILED
        if abs(dc.brocard.angle - ds.brocard.angle) > 1e-9:
            print("error: pipelines disagree on the Brocard angle",
                  file=sys.stderr)
            return EXIT_CHECK_FAILED
    out = dc if args.algo != "splitmerge" else ds
    data = diagram_to_json(out)
    if not args.brocard:
        data["brocard"] = None
    with _open_out(args.output) as f:
        dump_json(data, f)
    return EXIT_OK


def cmd_line(args) -> int:
    inst = _load(args.input)
    if inst["rays"] is None:
        raise InstanceError("line subcommand needs ray sites")
    try:
        a, b, c = (float(v) for v in args.line.split(","))
    except Exception as exc:
        raise InstanceError(f"--line expects a,b,c: {exc}") from exc
    dom = CurveDomain.line_from_coeffs(a, b, c)
    fs = partial_functions(inst["rays"], dom, UNRESTRICTED)
    env = lower_envelope(fs, dom, inst["rays"])
    with _open_out(args.output) as f:
        dump_json(envelope_to_json(env, brocard_curve(env)), f)
    return EXIT_OK


def cmd_curve(args) -> int:
    inst = _load(args.input)
    if inst["kind"] != "curve+rays" or inst["curve"] is None:
        raise InstanceError("curve subcommand needs a curve+rays instance")
    side = INSIDE if args.inside else OUTSIDE
    fs = partial_functions(inst["rays"], inst["curve"], side)
    env = lower_envelope(fs, inst["curve"], inst["rays"])
    with _open_out(args.output) as f:
        dump_json(envelope_to_json(env, brocard_curve(env)), f)
    return EXIT_OK


def cmd_brocard(args) -> int:
    inst = _load(args.input)
    if inst["kind"] == "polygon":
        P = _polygon_of(inst)
        res = build_pvd_collapse(P).brocard
    elif inst["kind"] == "rays":
        res = brocard_plane(inst["rays"])
    else:
        side = INSIDE if args.inside else OUTSIDE
        fs = partial_functions(inst["rays"], inst["curve"], side)
        env = lower_envelope(fs, inst["curve"], inst["rays"])
        res = brocard_curve(env)
    from .io import _brocard_to_json
    with _open_out(args.output) as f:
        dump_json({"version": "1", "type": "brocard",
                   "brocard": _brocard_to_json(res)}, f)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "regular-ngon":
        n = args.m
        if n < 3:
            raise InstanceError("regular-ngon needs --m >= 3")
        pts = [(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n))
               for k in range(n)]
        data = instance_to_json("polygon", polygon=pts)
    elif args.kind in ("nonintersecting", "grid"):
        rays = generate_adversarial(args.kind, args.m, seed=args.seed)
        data = instance_to_json("rays", rays=rays)
    else:
        raise InstanceError(f"unknown generator kind {args.kind!r}")
    with _open_out(args.output) as f:
        dump_json(data, f)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args.input)
    if inst["kind"] == "polygon":
        P = _polygon_of(inst)
        d = build_pvd_collapse(P)
        rays = d.rays
        region = list(P.vertices)
    else:
        rays = inst["rays"]
        d = build_plane_diagram(rays)
        xs = [r.apex[0] for r in rays]
        ys = [r.apex[1] for r in rays]
        pad = 2.0 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        region = (min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)
    rep = sample_compare(d, rays, region, args.samples, seed=args.seed)
    print(f"samples={rep.samples} excluded={rep.excluded} "
          f"mismatches={len(rep.mismatches)} seed={rep.seed}", file=sys.stderr)
    if not rep.ok:
        worst = rep.mismatches[0]
        print(f"first mismatch at {worst[0]}: diagram says {worst[2]}, "
              f"oracle says {worst[1]}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_render(args) -> int:
    with _open_in(args.input) as f:
        data = load_diagram(f)
    clip = None
    if args.clip:
        try:
            x0, y0, x1, y1 = (float(v) for v in args.clip.split(","))
        except Exception as exc:
            raise InstanceError(f"--clip expects x0,y0,x1,y1: {exc}") from exc
        clip = (x0, y0, x1, y1)
    with _open_out(args.output) as f:
        render_svg(data, f, clip=clip)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rotoray",
        description="Rotating rays Voronoi diagrams and Brocard angles.")
    ap.add_argument("--seed", type=int,
                    default=int(os.environ.get("ROTORAY_SEED", "1")),
                    help="deterministic seed (env ROTORAY_SEED)")
    ap.add_argument("--eps-angle", type=float,
                    default=float(os.environ.get("ROTORAY_EPS", "1e-9")),
                    help="angle comparison tolerance (env ROTORAY_EPS)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plane", help="full-plane diagram of a ray set")
    p.add_argument("-i", "--input", default=None)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--brocard", action="store_true")
    p.add_argument("--strict", action="store_true",
                   help="reject parallel pairs instead of handling them")
    p.set_defaults(func=cmd_plane)

    p = sub.add_parser("polygon", help="diagram inside a convex polygon")
    p.add_argument("-i", "--input", default=None)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--algo", choices=("collapse", "splitmerge", "both"),
                   default="collapse")
    p.add_argument("--brocard", action="store_true")
    p.set_defaults(func=cmd_polygon)

    p = sub.add_parser("line", help="envelope over a line domain")
    p.add_argument("-i", "--input", default=None)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--line", required=True, metavar="a,b,c",
                   help="line a*x + b*y = c")
    p.set_defaults(func=cmd_line)

    p = sub.add_parser("curve", help="envelope over a closed convex curve")
    p.add_argument("-i", "--input", default=None)
    p.add_argument("-o", "--output", default=None)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--inside", action="store_true",
                   help="site apices inside the curve")
    g.add_argument("--outside", action="store_true",
                   help="site apices outside; visibility restricted")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("brocard", help="Brocard angle of an instance")
    p.add_argument("-i", "--input", default=None)
    p.add_argument("-o", "--output", default=None)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--inside", action="store_true")
    g.add_argument("--outside", action="store_true")
    p.set_defaults(func=cmd_brocard)

    p = sub.add_parser("gen", help="emit generator instances")
    p.add_argument("--kind", required=True,
                   choices=("nonintersecting", "grid", "regular-ngon"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--seed", type=int,
                   default=int(os.environ.get("ROTORAY_SEED", "1")))
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="oracle comparison of a built diagram")
    p.add_argument("-i", "--input", default=None)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int,
                   default=int(os.environ.get("ROTORAY_SEED", "1")))
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("render", help="draw a diagram file as SVG")
    p.add_argument("-i", "--input", default=None)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--clip", default=None, metavar="x0,y0,x1,y1")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    geom.set_eps_angle(args.eps_angle)
    try:
        return args.func(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except RotorayError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
