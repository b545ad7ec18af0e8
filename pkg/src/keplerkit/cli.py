"""Command-line entry point: ``keplerkit <command> ...``.

Every command that writes a file also writes ``<file>.manifest.json``
recording the canonical argument list, so ``keplerkit replay --manifest M``
regenerates the same bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from . import __version__, constants, density, jsonio, lp, packing, stargraph, voronoi

PATH_OPTIONS = {"out", "packing", "references", "manifest"}


def _floats(text: str, count: int | None = None) -> list[float]:
    vals = [float(t) for t in text.split(",") if t.strip()]
    if count is not None and len(vals) != count:
        raise ValueError(f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def _emit(out: str | None, text: str) -> list[str]:
    if out is None:
        sys.stdout.write(text)
        return []
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return [out]


# command handlers return the list of files they wrote

def cmd_constants(args) -> list[str]:
    data = {c.name: c.as_dict() for c in constants.all_constants()}
    return _emit(args.out, jsonio.dumps(data, indent=1))


def cmd_generate(args) -> list[str]:
    if args.kind == "fcc":
        p = packing.fcc_packing(args.radius)
    elif args.kind == "hcp":
        p = packing.hcp_packing(args.radius)
    elif args.kind == "cubic":
        p = packing.cubic_packing(args.radius)
    else:
        if args.seed is None:
            raise ValueError("--kind random needs --seed")
        p = packing.random_saturated_packing(args.radius, args.seed, args.spacing)
    return _emit(args.out, jsonio.dumps(p.to_dict(), indent=1))


def cmd_voronoi(args) -> list[str]:
    p = packing.load_packing(args.packing)
    rows = [
        {"vertex": rec.index, "volume": rec.volume, "circumradius": rec.circumradius,
         "face_count": rec.face_count}
        for rec in voronoi.interior_cells(p)
    ]
    return _emit(args.out, jsonio.dumps(rows, indent=1))


def cmd_density(args) -> list[str]:
    p = packing.load_packing(args.packing)
    x = _floats(args.x, 3)
    radii = _floats(args.radii)
    # lemma_bound_check validates every window before computing anything
    checks = density.lemma_bound_check(p, x, radii, args.C1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "A", "delta", "bound", "satisfied", "fitted_C"])
    for c in checks:
        w.writerow([jsonio.fmt_float(c.r), jsonio.fmt_float(c.A), jsonio.fmt_float(c.delta),
                    jsonio.fmt_float(c.bound), str(c.satisfied).lower(), jsonio.fmt_float(c.fitted_C)])
    return _emit(args.out, buf.getvalue())


def _graph_record(g: stargraph.PlaneGraph, references=None) -> dict:
    rec = g.to_dict()
    rec["class"] = stargraph.classify(g, references).kind
    rec["canonical_code_hex"] = stargraph.canonical_form(g).hex()
    return rec


def cmd_graph(args) -> list[str]:
    if args.emit_references:
        out = args.out or str(stargraph.default_reference_path())
        stargraph.emit_references(out)
        stargraph.load_references.cache_clear()
        return [out]
    if args.packing is None or args.vertex is None:
        raise ValueError("graph needs --packing and --vertex (or --emit-references)")
    p = packing.load_packing(args.packing)
    g = stargraph.star_graph(stargraph.local_star(p, args.vertex))
    return _emit(args.out, jsonio.dumps(_graph_record(g, args.references), indent=1))


def _load_graph(name: str) -> stargraph.PlaneGraph:
    stars = stargraph.reference_stars()
    if name.upper() in stars:
        return stargraph.star_graph(stars[name.upper()])
    return stargraph.PlaneGraph.from_dict(jsonio.read_json(name), name)


def cmd_bnb_demo(args) -> list[str]:
    g = _load_graph(args.graph)
    out = lp.face_score_demo(g, args.target, args.max_nodes)
    data = out.to_dict()
    data["toy_optimum"] = lp.toy_optimum(g)
    return _emit(args.out, jsonio.dumps(data, indent=1))


def cmd_verify_all(args) -> list[str]:
    from . import verify

    results = verify.run_all(args.references)
    args.failed = sum(not r.passed for r in results)
    if args.json:
        data = {
            "passed": args.failed == 0,
            "checks": [{"criterion": r.criterion, "name": r.name, "passed": r.passed, "detail": r.detail}
                       for r in results],
        }
        text = jsonio.dumps(data, indent=1)
    else:
        lines = [r.line() for r in results]
        lines.append(f"{len(results) - args.failed}/{len(results)} checks passed")
        if args.failed:
            lines.append("failed: " + ", ".join(r.name for r in results if not r.passed))
        text = "\n".join(lines) + "\n"
    return _emit(args.out, text)


def cmd_replay(args) -> list[str]:
    manifest = jsonio.read_json(args.manifest)
    if manifest.get("tool_version") != __version__:
        print(f"warning: manifest written by version {manifest.get('tool_version')}, "
              f"replaying with {__version__}", file=sys.stderr)
    code = main(manifest["argv"])
    if code:
        raise RuntimeError(f"replayed command exited with status {code}")
    return []


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="keplerkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("constants", help="named constants with oracle checks (JSON)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("generate", help="write a packing file")
    s.add_argument("--kind", choices=["fcc", "hcp", "random", "cubic"], required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--spacing", type=float, default=0.25, help="candidate grid spacing for --kind random")
    s.add_argument("--out")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("voronoi", help="interior Voronoi cells (JSON)")
    s.add_argument("--packing", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_voronoi)

    s = sub.add_parser("density", help="finite densities against the explicit bound (CSV)")
    s.add_argument("--packing", required=True)
    s.add_argument("--x", default="0,0,0")
    s.add_argument("--radii", required=True)
    s.add_argument("--C1", type=float, default=0.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("graph", help="plane graph of a vertex star (JSON)")
    s.add_argument("--packing")
    s.add_argument("--vertex", type=int)
    s.add_argument("--references", help="reference graph file (default: bundled)")
    s.add_argument("--emit-references", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("bnb-demo", help="branch and bound on the toy face score")
    s.add_argument("--graph", required=True, help="graph JSON file, or fcc / hcp / pent")
    s.add_argument("--target", type=float, required=True)
    s.add_argument("--max-nodes", type=int, default=100_000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_bnb_demo)

    s = sub.add_parser("verify-all", help="run every acceptance check")
    s.add_argument("--json", action="store_true")
    s.add_argument("--references")
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_all)

    s = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    s.add_argument("--manifest", required=True)
    s.set_defaults(func=cmd_replay)
    return parser


def canonical_argv(args) -> tuple[list[str], dict]:
    """Argument list and parameter map with file paths made absolute."""
    params = {}
    for key, val in vars(args).items():
        if key in ("command", "func", "failed") or val is None:
            continue
        if key in PATH_OPTIONS and isinstance(val, str):
            val = os.path.abspath(val)
        params[key] = val
    if args.command == "bnb-demo" and Path(args.graph).exists():
        params["graph"] = os.path.abspath(args.graph)
    argv = [args.command]
    for key, val in params.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        else:
            argv += [flag, str(val)]
    return argv, params


def write_manifest(args, outputs: list[str]) -> None:
    argv, params = canonical_argv(args)
    manifest = {
        "command": args.command,
        "parameters": params,
        "argv": argv,
        "tool_version": __version__,
        "seed": getattr(args, "seed", None),
        "outputs": [os.path.abspath(o) for o in outputs],
    }
    for out in outputs:
        jsonio.write_json(out + ".manifest.json", manifest)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        outputs = args.func(args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"keplerkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if outputs and args.command != "replay":
        write_manifest(args, outputs)
    return 1 if getattr(args, "failed", 0) else 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
