"""Command-line front door: folner, blocks, analyze, measures, pipeline."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .analysis import (
    boundary_mass_bound,
    check_partitions,
    return_times,
    scan_occurrences,
)
from .blocks import BlockHierarchy, Pattern, build_hierarchy, verify_c3
from .errors import MonotileError, RenderUnsupportedError
from .folner import (
    FolnerLadder,
    check_congruent,
    folner_defect,
    invariance_table,
)
from .groups import FiniteSubset, context_from_descriptor
from .matrices import ManagedSequence, positivity_horizon, select_subsequence_lemma8
from .pipeline import (
    DEFAULT_CONFIG,
    PipelineConfig,
    build_ladder_from_config,
    run_pipeline,
    write_json,
)
from .simplex import approximate_limit, check_nesting, realize_finite_simplex

__all__ = ["main", "render_pattern"]


def render_pattern(p: Pattern, mode: str = "text") -> str:
    """Deterministic rendering; text mode needs an interval or box support.

    Rows follow the first coordinate ascending, columns the second.
    """
    if mode == "json":
        return json.dumps(p.to_json(), sort_keys=True, separators=(",", ":"))
    if mode != "text":
        raise ValueError(f"unknown render mode {mode!r}")
    desc = p.support.ctx.descriptor()
    if desc.get("kind") != "lattice" or desc.get("d") not in (1, 2):
        raise RenderUnsupportedError(
            f"text rendering needs a rank-1 or rank-2 lattice, got {desc}")
    cells = p.support.elements
    if desc["d"] == 1:
        xs = [g[0] for g in cells]
        if xs != list(range(xs[0], xs[0] + len(xs))):
            raise RenderUnsupportedError("support is not a contiguous interval")
        return " ".join(str(s) for s in p.symbols)
    xs = sorted({g[0] for g in cells})
    ys = sorted({g[1] for g in cells})
    if (xs != list(range(xs[0], xs[0] + len(xs)))
            or ys != list(range(ys[0], ys[0] + len(ys)))
            or len(cells) != len(xs) * len(ys)):
        raise RenderUnsupportedError("support is not a full box")
    return "\n".join(
        " ".join(str(p.value((x, y))) for y in ys) for x in xs)


def _print(data, fmt: str, text_fn=None) -> None:
    if fmt == "text" and text_fn is not None:
        print(text_fn(data))
    else:
        print(json.dumps(data, sort_keys=True, separators=(",", ": ")))


def _load_ladder(path: str) -> FolnerLadder:
    with open(path) as fh:
        return FolnerLadder.from_json(json.load(fh))


def _load_hierarchy(path: str) -> BlockHierarchy:
    with open(path) as fh:
        return BlockHierarchy.from_json(json.load(fh))


def _load_sequence(path: str) -> ManagedSequence:
    with open(path) as fh:
        return ManagedSequence.from_json(json.load(fh))


def _parse_levels(text: str, top: int) -> list[int]:
    if text is None:
        return list(range(top + 1))
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",")]


def _cmd_folner(args) -> int:
    if args.action == "build":
        group = json.loads(args.group)
        ladder_cfg = {"route": args.route, "depth": args.depth, "base": args.base}
        if args.route is None:
            kind = group.get("kind")
            ladder_cfg["route"] = {"lattice": "lattice", "pruefer": "pruefer",
                                   "heisenberg3": "heisenberg"}.get(kind, "abelian")
        if args.eps_schedule:
            mode, _, ratio = args.eps_schedule.partition(":")
            if mode != "geometric" or not ratio:
                raise MonotileError(f"unknown eps schedule {args.eps_schedule!r}")
            ladder_cfg["eps_start"] = ratio
            ladder_cfg["eps_step"] = ratio
        ladder = build_ladder_from_config(group, ladder_cfg)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(ladder.to_json(), out / "ladder.json")
        _print({"written": str(out / "ladder.json"),
                "levels": [len(F) for F in ladder.levels]}, args.format)
        return 0
    if args.action == "check":
        ladder = _load_ladder(args.ladder)
        result = check_congruent(ladder)
        _print(result.to_json(), args.format,
               lambda d: "congruent" if d["ok"] else f"FAIL at level {d['level']}: {d['reason']}")
        return 0 if result.ok else 1
    if args.action == "defect":
        ladder = _load_ladder(args.ladder)
        elems = [ladder.ctx.decode_json(e) for e in json.loads(args.K)]
        window = FiniteSubset(ladder.ctx, elems)
        rows = [r.to_json() for r in invariance_table(ladder, window)]
        per_element = {
            json.dumps(ladder.ctx.encode_json(g)): [
                str(folner_defect(F, g)) for F in ladder.levels]
            for g in elems
        }
        _print({"window_defects": rows, "element_defects": per_element}, args.format)
        return 0
    raise MonotileError(f"unknown folner action {args.action!r}")


def _cmd_blocks(args) -> int:
    if args.action == "build":
        ladder = _load_ladder(args.ladder)
        seq = _load_sequence(args.matrices)
        depth = args.depth if args.depth is not None else len(seq)
        hierarchy = build_hierarchy(ladder, [seq[i] for i in range(depth)])
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(hierarchy.to_json(), out / "hier.json")
        _print({"written": str(out / "hier.json"),
                "block_counts": [len(f) for f in hierarchy.families]}, args.format)
        return 0
    if args.action == "verify-c3":
        hierarchy = _load_hierarchy(args.hier)
        levels = [args.level] if args.level is not None else range(hierarchy.depth + 1)
        results = {}
        ok = True
        for lvl in levels:
            r = verify_c3(hierarchy.family(lvl))
            results[str(lvl)] = r.to_json()
            ok = ok and r.ok
        _print({"ok": ok, "levels": results}, args.format,
               lambda d: "rigid" if d["ok"] else "FAIL")
        return 0 if ok else 1
    if args.action == "x0":
        hierarchy = _load_hierarchy(args.hier)
        patch = hierarchy.x0_patch(args.level)
        print(render_pattern(patch, args.render))
        return 0
    raise MonotileError(f"unknown blocks action {args.action!r}")


def _cmd_analyze(args) -> int:
    if args.action == "returns":
        hierarchy = _load_hierarchy(args.hier)
        algebraic = return_times(hierarchy, args.n, args.m)
        scanned = scan_occurrences(hierarchy, args.n, args.m)
        equal = algebraic.elements == scanned.elements
        expected = len(hierarchy.ladder.levels[args.m]) // len(hierarchy.ladder.levels[args.n])
        data = {"equal": equal, "count": len(algebraic), "expected": expected,
                "returns": algebraic.encode_json()}
        _print(data, args.format,
               lambda d: f"{d['count']} return times, oracles {'agree' if d['equal'] else 'DISAGREE'}")
        return 0 if equal and len(algebraic) == expected else 1
    if args.action == "kr":
        hierarchy = _load_hierarchy(args.hier)
        report = check_partitions(hierarchy, args.n, args.m)
        _print(report.to_json(), args.format,
               lambda d: "partitions exact" if d["ok"] else f"FAIL: {d['reason']}")
        return 0 if report.ok else 1
    if args.action == "boundary":
        ladder = _load_ladder(args.ladder)
        g = ladder.ctx.decode_json(json.loads(args.g))
        levels = _parse_levels(args.levels, ladder.depth)
        rows = [{"level": n, "mass": str(boundary_mass_bound(ladder, g, n))} for n in levels]
        _print({"element": json.loads(args.g), "masses": rows}, args.format)
        return 0
    raise MonotileError(f"unknown analyze action {args.action!r}")


def _cmd_measures(args) -> int:
    if args.action == "check":
        seq = _load_sequence(args.seq)
        data = {"ok": True, "matrices": len(seq),
                "ratios": [seq[i].ratio for i in range(len(seq))],
                "shapes": [[seq[i].rows, seq[i].cols] for i in range(len(seq))],
                "positivity_horizon": positivity_horizon(seq, 0)}
        _print(data, args.format,
               lambda d: f"{d['matrices']} managed matrices, ratios {d['ratios']}")
        return 0
    if args.action == "limit":
        seq = _load_sequence(args.seq)
        approx = approximate_limit(seq, args.n, args.d)
        certs = []
        ok = True
        for d in range(1, min(args.d + 1, len(seq) - args.n)):
            cert = check_nesting(seq, args.n, d)
            ok = ok and cert.ok
            certs.append({"depth": d, "ok": cert.ok, "method": cert.method})
        _print({"ok": ok, "approximant": approx.to_json(), "nesting": certs}, args.format)
        return 0 if ok else 1
    if args.action == "lemma8":
        seq = _load_sequence(args.seq)
        boundaries = select_subsequence_lemma8(seq, Fraction(args.K))
        _print({"boundaries": boundaries}, args.format)
        return 0
    if args.action == "realize":
        ladder = _load_ladder(args.ladder)
        result = realize_finite_simplex(args.d, ladder, Fraction(args.tol))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(result.sequence.to_json(), out / "realized.json")
        _print({"written": str(out / "realized.json"), "depth": result.depth,
                "diameters": [str(x) for x in result.diameters]}, args.format)
        return 0
    raise MonotileError(f"unknown measures action {args.action!r}")


def _cmd_pipeline(args) -> int:
    if args.action == "default-config":
        print(json.dumps(DEFAULT_CONFIG, sort_keys=True, indent=2))
        return 0
    if args.action == "run":
        if args.config:
            config = PipelineConfig.load(args.config)
        else:
            config = PipelineConfig.from_json({})
        report = run_pipeline(config, args.out, verbose=args.verbose)
        _print(report.artifact_json(), args.format,
               lambda d: "\n".join(f"{s['name']}: {'ok' if s['ok'] else 'FAIL'}"
                                   for s in d["stages"]))
        return 0 if report.ok else 1
    raise MonotileError(f"unknown pipeline action {args.action!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monotiles",
        description="Congruent Folner ladders, block hierarchies, and exact "
                    "invariant-measure simplex approximants.")
    parser.add_argument("--out", default=".", help="directory for written artifacts")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    folner = sub.add_parser("folner", help="build and verify congruent ladders")
    fsub = folner.add_subparsers(dest="action", required=True)
    fb = fsub.add_parser("build")
    fb.add_argument("--group", required=True, help='JSON descriptor, e.g. {"kind":"lattice","d":1}')
    fb.add_argument("--depth", type=int, required=True)
    fb.add_argument("--base", type=int, default=3, help="box base for lattice routes")
    fb.add_argument("--route", choices=("lattice", "pruefer", "abelian", "heisenberg"))
    fb.add_argument("--eps-schedule", help="invariance tolerances, e.g. geometric:1/2")
    fc = fsub.add_parser("check")
    fc.add_argument("ladder")
    fd = fsub.add_parser("defect")
    fd.add_argument("ladder")
    fd.add_argument("--K", required=True, help="JSON list of element encodings")

    blocks = sub.add_parser("blocks", help="build and verify block hierarchies")
    bsub = blocks.add_subparsers(dest="action", required=True)
    bb = bsub.add_parser("build")
    bb.add_argument("--ladder", required=True)
    bb.add_argument("--matrices", required=True)
    bb.add_argument("--depth", type=int)
    bv = bsub.add_parser("verify-c3")
    bv.add_argument("hier")
    bv.add_argument("--level", type=int)
    bx = bsub.add_parser("x0")
    bx.add_argument("hier")
    bx.add_argument("--level", type=int, required=True)
    bx.add_argument("--render", choices=("text", "json"), default="text")

    analyze = sub.add_parser("analyze", help="return times, partitions, boundary mass")
    asub = analyze.add_subparsers(dest="action", required=True)
    ar = asub.add_parser("returns")
    ar.add_argument("--hier", required=True)
    ar.add_argument("-n", type=int, required=True)
    ar.add_argument("-m", type=int, required=True)
    ak = asub.add_parser("kr")
    ak.add_argument("--hier", required=True)
    ak.add_argument("-n", type=int, required=True)
    ak.add_argument("-m", type=int, required=True)
    ab = asub.add_parser("boundary")
    ab.add_argument("--ladder", required=True)
    ab.add_argument("-g", required=True, help="JSON element encoding")
    ab.add_argument("--levels", help="level range like 0..4 or comma list")

    measures = sub.add_parser("measures", help="managed sequences and simplex limits")
    msub = measures.add_subparsers(dest="action", required=True)
    mc = msub.add_parser("check")
    mc.add_argument("seq")
    ml = msub.add_parser("limit")
    ml.add_argument("seq")
    ml.add_argument("-n", type=int, default=0)
    ml.add_argument("-d", type=int, required=True)
    m8 = msub.add_parser("lemma8")
    m8.add_argument("seq")
    m8.add_argument("--K", required=True, help="managed growth bound (rational)")
    mr = msub.add_parser("realize")
    mr.add_argument("--d", type=int, required=True, help="number of extreme points")
    mr.add_argument("--ladder", required=True)
    mr.add_argument("--tol", required=True, help="cluster diameter tolerance (rational)")

    pipe = sub.add_parser("pipeline", help="run the full build-and-verify pipeline")
    psub = pipe.add_subparsers(dest="action", required=True)
    pr = psub.add_parser("run")
    pr.add_argument("config", nargs="?", help="config file; omitted = shipped default")
    psub.add_parser("default-config")

    return parser


_HANDLERS = {
    "folner": _cmd_folner,
    "blocks": _cmd_blocks,
    "analyze": _cmd_analyze,
    "measures": _cmd_measures,
    "pipeline": _cmd_pipeline,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (MonotileError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
