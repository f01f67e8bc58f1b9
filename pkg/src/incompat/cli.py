"""Command line front end.

Subcommands generate graphs, compute invariants and eta bounds, enumerate
switching classes, build realizations, certify sign matrices, and sweep a
family writing CSV.  Graphs travel as JSON on files or stdin/stdout so the
commands compose in pipelines.

Exit codes: 0 success, 2 invalid input, 3 resource cap hit, 4 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import _config, graphs, invariants, realization, robustness, spectral
from .errors import (CapExceeded, IncompatError, SolverError, ValidationError)


def _read_stream(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_graph(path: str, text: bool = False) -> graphs.Graph:
    raw = _read_stream(path)
    if text:
        return graphs.from_text(raw)
    try:
        return graphs.from_json(raw)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"could not parse graph from {path!r}: {exc}")


def _emit(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _family_params(args) -> dict:
    params = {}
    for key in ("n", "k", "r", "s", "d"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if getattr(args, "intersections", None):
        params["intersections"] = [int(x) for x in args.intersections.split(",")]
    return params


def _resolve_graph(args) -> graphs.Graph:
    """A graph either from a file/stdin or generated from --family flags."""
    family = getattr(args, "family", None)
    source = args.graph or getattr(args, "graph_flag", None)
    if family is not None:
        if source is not None:
            raise ValidationError("give either a graph file or --family, not both")
        g = graphs.gen_family(family, **_family_params(args))
        if getattr(args, "line", False):
            g, _ = graphs.line_graph(g)
        return g
    if source is None:
        raise ValidationError("no graph given: pass a file (- for stdin) or --family")
    return _load_graph(source, args.text)


def cmd_gen(args) -> int:
    g = graphs.gen_family(args.family, **_family_params(args))
    if args.line:
        g, _ = graphs.line_graph(g)
    _emit(graphs.to_json_dict(g), args.output)
    return 0


def cmd_invariants(args) -> int:
    g = _resolve_graph(args)
    _emit(invariants.invariants_report(g), args.output)
    return 0


def cmd_bounds(args) -> int:
    g = _resolve_graph(args)
    opts = robustness.ReportOptions(
        exact_sdp=args.exact_sdp,
        sdp_gap=args.sdp_gap,
        subgraph_search=args.subgraph_search,
        theta_cap=args.theta_cap,
        clique_cap=args.clique_cap,
        class_cap=args.class_cap,
    )
    _emit(robustness.bounds_report(g, opts), args.output)
    return 0


def cmd_eta_exact(args) -> int:
    g = _resolve_graph(args)
    if args.realization == "majorana":
        obs = realization.realize_majorana(g)
    else:
        obs = realization.realize_minimal(g)
    res = robustness.eta_exact_sdp(obs, gap_tol=args.gap, n_cap=args.n_cap,
                                   dim_cap=args.dim_cap)
    doc = {
        "eta": res.value,
        "gap": res.gap,
        "iterations": res.iterations,
        "dimension": obs.dimension,
        "observables": obs.n,
        "residuals": res.povm.residuals(obs.matrices()),
    }
    if args.witness:
        res.povm.to_binary(args.witness)
        doc["witness_file"] = args.witness
    _emit(doc, args.output)
    return 0


def cmd_skew(args) -> int:
    g = _resolve_graph(args)
    energy, witness = spectral.max_skew_energy(g, cap=args.class_cap)
    smat = spectral.skew_matrix(witness).astype(np.int64)
    doc = {
        "class_count": sum(1 for _ in spectral.switching_classes(g, args.class_cap)),
        "max_skew_energy": energy,
        "witness": spectral.orientation_to_json_dict(witness),
        "witness_certificates": spectral.matrix_certificates(smat).to_json_dict(),
    }
    if args.list_classes:
        doc["classes"] = [
            {"cotree_signs": o.cotree_bits,
             "skew_energy": spectral.skew_energy(o)}
            for o in spectral.switching_classes(g, args.class_cap)
        ]
    _emit(doc, args.output)
    return 0


def cmd_realize(args) -> int:
    g = _resolve_graph(args)
    if args.style == "majorana":
        obs = realization.realize_majorana(g)
    else:
        obs = realization.realize_minimal(g)
    _emit(realization.to_json_dict(obs), args.output)
    return 0


def cmd_certify(args) -> int:
    raw = _read_stream(args.matrix)
    try:
        rows = json.loads(raw)
        mat = np.array(rows, dtype=np.int64)
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise ValidationError(f"matrix must be a JSON array of integer rows: {exc}")
    if mat.ndim != 2:
        raise ValidationError("matrix must be two dimensional")
    _emit(spectral.matrix_certificates(mat).to_json_dict(), args.output)
    return 0


def cmd_sweep(args) -> int:
    if args.stop < args.start:
        raise ValidationError("stop must be >= start")
    opts = robustness.ReportOptions()
    rows = []
    for n in range(args.start, args.stop + 1):
        g = graphs.gen_family(args.family, n=n)
        rep = robustness.bounds_report(g, opts)
        exact = rep["eta_exact"]
        rows.append([args.family, n,
                     f"{rep['eta_lower']:.12f}",
                     f"{rep['eta_upper']:.12f}",
                     "" if exact is None else f"{exact:.12f}"])
    if args.output and args.output != "-":
        fh = open(args.output, "w", encoding="utf-8", newline="")
    else:
        fh = sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(["family", "n", "eta_lower", "eta_upper", "eta_exact"])
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="incompat",
        description="bounds and certificates for the incompatibility "
                    "robustness of anti-commutativity graphs")
    top.add_argument("--max-classes", type=int, default=None,
                     help="cap on the co-tree rank for switching enumeration")
    top.add_argument("--max-sdp-dim", type=int, default=None,
                     help="cap on the summed squared block sizes of SDPs")
    top.add_argument("--threads", type=int, default=None,
                     help="worker threads for switching-class scans")
    sub = top.add_subparsers(dest="command", required=True)

    def add_graph_io(p):
        p.add_argument("graph", help="graph JSON file, or - for stdin")
        p.add_argument("--text", action="store_true",
                       help="read the plain 'n m' edge-list format instead")
        p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("gen", help="generate a family graph")
    p.add_argument("family", choices=sorted(graphs.FAMILIES))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--intersections",
                   help="comma separated intersection sizes for merged-johnson")
    p.add_argument("--line", action="store_true",
                   help="emit the line graph of the generated graph")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("invariants", help="clique, coloring and theta report")
    add_graph_io(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("bounds", help="certified eta interval report")
    add_graph_io(p)
    p.add_argument("--exact-sdp", action="store_true",
                   help="also run the exact eta SDP when within caps")
    p.add_argument("--sdp-gap", type=float, default=1e-9)
    p.add_argument("--subgraph-search", action="store_true",
                   help="search vertex deletions for sharper subgraph bounds")
    p.add_argument("--theta-cap", type=int, default=80)
    p.add_argument("--clique-cap", type=int, default=40)
    p.add_argument("--class-cap", type=int, default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("eta-exact", help="exact eta with a parent POVM witness")
    add_graph_io(p)
    p.add_argument("--gap", type=float, default=1e-9)
    p.add_argument("--n-cap", type=int, default=6)
    p.add_argument("--dim-cap", type=int, default=16)
    p.add_argument("--realization", choices=("minimal", "majorana"),
                   default="minimal")
    p.add_argument("--witness", default=None,
                   help="write the parent POVM to this binary file")
    p.set_defaults(func=cmd_eta_exact)

    p = sub.add_parser("skew", help="maximum skew energy over switching classes")
    add_graph_io(p)
    p.add_argument("--class-cap", type=int, default=None)
    p.add_argument("--list-classes", action="store_true")
    p.set_defaults(func=cmd_skew)

    p = sub.add_parser("realize", help="observables realizing a graph")
    add_graph_io(p)
    p.add_argument("--style", choices=("minimal", "majorana"),
                   default="minimal")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("certify", help="recognize weighing/conference/Hadamard "
                                       "structure in a sign matrix")
    p.add_argument("matrix", help="JSON file with integer rows, or - for stdin")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sweep", help="CSV of eta bounds over a parameter range")
    p.add_argument("--family", choices=("complete", "cycle", "path"),
                   required=True)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--stop", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_sweep)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"max_classes": args.max_classes,
                 "max_sdp_dim": args.max_sdp_dim,
                 "threads": args.threads}
    for name, value in overrides.items():
        if value is not None:
            _config.set_override(name, value)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        msg = f"solver failure: {exc}"
        if exc.lower is not None or exc.upper is not None:
            msg += f" (best bounds: lower={exc.lower}, upper={exc.upper})"
        print(msg, file=sys.stderr)
        return 4
    except IncompatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        for name in overrides:
            _config.set_override(name, None)


if __name__ == "__main__":
    sys.exit(main())
