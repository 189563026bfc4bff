"""Command-line front end.

Every subcommand writes JSON (or an edge list for ``gen``) to stdout or to
``--out``. With ``--out`` a ``<out>.manifest.json`` side file records the
command, parameters, seed, library versions, wall time and a digest of the
output. Exit codes: 0 success, 1 failed verification, 2 usage error,
3 budget exhausted (a bracket is reported instead of an exact value).
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import platform
import sys
import time

import numpy as np
import scipy

from . import __version__
from .coloring import (Budget, Coloring, dsatur_coloring, exact_chromatic_number, gf_coloring,
                       layered_coloring, max_independent_set, verify_coloring)
from .gf import smallest_prime_power_at_least
from .graph import Graph, bfs_layers, check_equitable, read_edge_list, write_edge_list
from .matchings import PerfectMatching, build_flip_graph, matching_distance, type_partition
from .signed import (build_reversal_graph, build_signed_reversal_graph, cell_partition,
                     known_coloring, sign_position_partition)
from .spectra import flip_spectrum, verify_spectrum_exact, SpectrumMismatch

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
FAMILIES = ("flip", "sr", "rev")


class UsageError(Exception):
    pass


def family_graph(family: str, n: int) -> Graph:
    if family == "flip":
        return build_flip_graph(n).graph
    if family == "sr":
        return build_signed_reversal_graph(n).graph
    if family == "rev":
        return build_reversal_graph(n)
    raise UsageError(f"unknown family {family!r}")


def _budget(args) -> Budget:
    return Budget(seconds=args.budget_seconds)


def cmd_gen(args):
    buf = io.StringIO()
    write_edge_list(family_graph(args.family, args.n), buf)
    return buf.getvalue(), EXIT_OK


def cmd_spectrum(args):
    if args.family != "flip":
        raise UsageError("closed-form spectra exist only for the flip family")
    spec = flip_spectrum(args.n)
    result = {"family": "flip", "n": args.n, "spectrum": [e.to_dict() for e in spec], "verified": None}
    code = EXIT_OK
    if args.verify_exact:
        try:
            report = verify_spectrum_exact(build_flip_graph(args.n).graph, spec)
            result["verified"] = True
            result["moments"] = [str(m) for m in report.moments]
        except SpectrumMismatch as exc:
            result["verified"] = False
            result["error"] = str(exc)
            code = EXIT_FAILED
    return result, code


def _coloring_result(g: Graph, c: Coloring) -> dict:
    return {"num_colors": c.num_colors, "colors_used": c.colors_used,
            "verified": bool(verify_coloring(g, c)), "colors": list(c.colors)}


def cmd_color(args):
    method, family, n = args.method, args.family, args.n
    code = EXIT_OK
    extra: dict = {}
    if method in ("gf", "layered"):
        if family != "flip":
            raise UsageError(f"the {method} colouring is defined for the flip family only")
        fg = build_flip_graph(n)
        g = fg.graph
        if method == "gf":
            c = gf_coloring(n, fg)
            extra["field"] = str(smallest_prime_power_at_least(2 * n + 1))
        else:
            c = layered_coloring(n, fg=fg)
    elif method == "stored":
        if family != "sr":
            raise UsageError("stored colourings exist for the sr family only")
        g = family_graph(family, n)
        c = known_coloring(n)
    else:
        g = family_graph(family, n)
        if method == "dsatur":
            c = dsatur_coloring(g, args.seed)
        else:
            res = exact_chromatic_number(g, _budget(args), seed=args.seed)
            c = res.certificate
            extra.update(lower=res.lower, upper=res.upper, exact=res.exact, nodes=res.nodes, log=res.log)
            if not res.exact:
                code = EXIT_BUDGET
    if args.coloring_out:
        with open(args.coloring_out, "w", newline="\n") as fh:
            c.write(fh)
    result = {"method": method, "family": family, "n": n, **extra, **_coloring_result(g, c)}
    return result, code


def cmd_verify_coloring(args):
    with open(args.graph) as fh:
        g = read_edge_list(fh)
    with open(args.coloring) as fh:
        c = Coloring.read(fh)
    if len(c) != g.num_vertices:
        return {"ok": False, "error": f"colouring covers {len(c)} of {g.num_vertices} vertices"}, EXIT_FAILED
    check = verify_coloring(g, c)
    result = {"ok": check.ok, "witness": list(check.witness) if check.witness else None,
              "num_vertices": g.num_vertices, "num_colors": c.num_colors, "colors_used": c.colors_used}
    return result, EXIT_OK if check.ok else EXIT_FAILED


def cmd_alpha(args):
    g = family_graph(args.family, args.n)
    res = max_independent_set(g, _budget(args))
    result = {"family": args.family, "n": args.n, "lower": res.lower, "upper": res.upper,
              "exact": res.exact, "nodes": res.nodes, "certificate": res.certificate}
    return result, EXIT_OK if res.exact else EXIT_BUDGET


def cmd_quotient(args):
    kind, family, n = args.kind, args.family, args.n
    if kind == "type":
        if family != "flip":
            raise UsageError("the type partition is defined for the flip family")
        fg = build_flip_graph(n)
        g, p = fg.graph, type_partition(fg)
    elif kind == "cells":
        if family != "sr":
            raise UsageError("the cell partition is defined for the sr family")
        g, p = family_graph(family, n), cell_partition(n)
    elif kind == "signs":
        if family != "sr":
            raise UsageError("the sign-position partition is defined for the sr family")
        g, p = family_graph(family, n), sign_position_partition(n)
    else:
        raise UsageError(f"unknown partition {kind!r}")
    b = check_equitable(g, p)
    names = [list(x) if isinstance(x, tuple) else x for x in p.names]
    return {"partition": kind, "family": family, "n": n, "cells": names,
            "sizes": p.sizes(), "quotient": b.tolist()}, EXIT_OK


def cmd_distance(args):
    m1, m2 = PerfectMatching.parse(args.m1), PerfectMatching.parse(args.m2)
    if m1.n != args.n or m2.n != args.n:
        raise UsageError(f"matchings must cover 2n = {2 * args.n} vertices")
    return {"n": args.n, "m1": str(m1), "m2": str(m2), "distance": matching_distance(m1, m2)}, EXIT_OK


def cmd_geodesics(args):
    fg = build_flip_graph(args.n)
    bfs = bfs_layers(fg.graph, fg.identity_index)
    layers = []
    for d, verts in enumerate(bfs.layers()):
        counts: dict[int, int] = {}
        for v in verts:
            counts[bfs.count[v]] = counts.get(bfs.count[v], 0) + 1
        layers.append({"distance": d, "vertices": len(verts),
                       "geodesic_counts": {str(k): v for k, v in sorted(counts.items())}})
    return {"n": args.n, "source": str(fg.matching(fg.identity_index)),
            "eccentricity": bfs.eccentricity(), "layers": layers}, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-seconds", type=float, default=None)
    common.add_argument("--threads", type=int, default=1, help="worker count (searches currently run in one worker)")

    parser = argparse.ArgumentParser(prog="flipgraphs", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="edge list of a graph")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("spectrum", parents=[common], help="closed-form spectrum")
    p.add_argument("family", choices=("flip",))
    p.add_argument("n", type=int)
    p.add_argument("--verify-exact", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("color", parents=[common], help="construct or search for a colouring")
    p.add_argument("method", choices=("gf", "layered", "dsatur", "exact", "stored"))
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("n", type=int)
    p.add_argument("--coloring-out", help="also write the colouring file format here")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("verify-coloring", parents=[common], help="check a colouring file against an edge list")
    p.add_argument("graph")
    p.add_argument("coloring")
    p.set_defaults(func=cmd_verify_coloring)

    p = sub.add_parser("alpha", parents=[common], help="independence number")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("quotient", parents=[common], help="quotient matrix of an equitable partition")
    p.add_argument("kind", choices=("type", "cells", "signs"))
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("distance", parents=[common], help="flip distance between two matchings")
    p.add_argument("n", type=int)
    p.add_argument("m1", help="e.g. 0-1,2-3")
    p.add_argument("m2")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("geodesics", parents=[common], help="distance layers and geodesic counts from the identity")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_geodesics)
    return parser


def _render(result) -> str:
    if isinstance(result, str):
        return result
    return json.dumps(result, sort_keys=True, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    raise TypeError(f"cannot serialise {type(x).__name__}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        result, code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except (ValueError, MemoryError) as exc:
        print(f"flipgraphs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = _render(result)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
        params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
        manifest = {
            "command": args.command,
            "parameters": params,
            "seed": args.seed,
            "versions": {"flipgraphs": __version__, "numpy": np.__version__,
                         "scipy": scipy.__version__, "python": platform.python_version()},
            "wall_time": round(time.monotonic() - start, 6),
            "result_digest": "sha256:" + hashlib.sha256(text.encode()).hexdigest(),
            "exit_code": code,
        }
        with open(args.out + ".manifest.json", "w", newline="\n") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
