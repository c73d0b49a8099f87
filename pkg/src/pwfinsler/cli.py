"""Command-line interface.

Exit status is 0 on success, 1 when a check fails or a hypothesis does not
hold, and 2 for usage errors (bad flags, unreadable or malformed input).
JSON output has sorted keys and 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .classify import (BERWALD_TOL, LANDSBERG_TOL, THETA_TOL, berwald_fit,
                       classification_report, curvature_table, gauss_bonnet_check,
                       landsberg_defect, theta_M)
from .cone import (INCOMING, OUTGOING, TangentCone, build_cone, cone_two_point_geodesic,
                   extension_set, sample_directions)
from .errors import (FinslerError, HypothesisViolated, InvalidArgument,
                     SurfaceFormatError)
from .geodesic import DirectedPoint, polyline_svg, trace
from .surface import euler_characteristic, load_surface, validate

DIGITS = 12


def _clean(x):
    """Round floats to the output precision; non-finite values become null."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.{DIGITS}g}") if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=1)


class UsageError(Exception):
    pass


def _common(p):
    p.add_argument("--tol", type=float, default=None,
                   help="pass/fail tolerance (command-specific default)")
    p.add_argument("--samples", type=int, default=None,
                   help="samples per edge, or directions per vertex")
    p.add_argument("--seed", type=int, default=0, help="seed for random sampling (default 0)")
    p.add_argument("--max-crossings", type=int, default=1000)
    p.add_argument("--vertex-tol", type=float, default=1e-9)
    p.add_argument("--strict", action="store_true", help="reject unknown keys in the input")
    p.add_argument("--force", action="store_true",
                   help="report even when a hypothesis fails")
    p.add_argument("--format", choices=("json", "svg"), default="json")
    p.add_argument("--out", default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pwfinsler",
                                 description="Geodesics and curvature of piecewise "
                                             "flat Finsler surfaces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        return p

    p = cmd("validate", "check edge compatibility, vertex stars and norms")
    p.add_argument("input")

    p = cmd("trace", "trace a geodesic from a point and direction")
    p.add_argument("input")
    p.add_argument("--triangle", type=int, required=True)
    p.add_argument("--start", type=float, nargs=2, required=True, metavar=("X", "Y"))
    p.add_argument("--dir", type=float, nargs=2, required=True, metavar=("DX", "DY"),
                   help="direction in the triangle chart (rescaled to unit length)")
    p.add_argument("--max-length", type=float, default=math.inf)

    p = cmd("curvature", "curvature of every interior vertex")
    p.add_argument("input")
    p.add_argument("--vertex", default=None)
    p.add_argument("--sign", choices=(INCOMING, OUTGOING), default=INCOMING)

    p = cmd("extensions", "geodesic extensions through a vertex")
    p.add_argument("input")
    p.add_argument("--vertex", required=True)
    p.add_argument("--sign", choices=(INCOMING, OUTGOING), default=INCOMING)

    p = cmd("check-landsberg", "crossing-map isometry defect on every edge")
    p.add_argument("input")

    p = cmd("check-berwald", "linear fit of the crossing map on every edge")
    p.add_argument("input")

    p = cmd("gauss-bonnet", "total curvature against theta times chi")
    p.add_argument("input")

    p = cmd("cone-distance", "shortest path between two points of a tangent cone")
    p.add_argument("input", nargs="?", default=None)
    p.add_argument("--vertex", default=None)
    p.add_argument("--angles", type=float, nargs="+", default=None,
                   help="Euclidean sector openings, instead of a surface vertex")
    p.add_argument("--from", dest="src", type=float, nargs=3, required=True,
                   metavar=("SECTOR", "X", "Y"))
    p.add_argument("--to", dest="dst", type=float, nargs=3, required=True,
                   metavar=("SECTOR", "X", "Y"))

    p = cmd("export", "full classification report (json) or a traced strip (svg)")
    p.add_argument("input")
    p.add_argument("--triangle", type=int, default=None)
    p.add_argument("--start", type=float, nargs=2, default=None)
    p.add_argument("--dir", type=float, nargs=2, default=None)
    p.add_argument("--max-length", type=float, default=math.inf)
    return ap


def _load(args):
    try:
        return load_surface(args.input, strict=args.strict)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror or exc}") from None


def _trace(args, surface):
    if args.triangle is None or args.start is None or args.dir is None:
        raise UsageError("--triangle, --start and --dir are required")
    F = surface.norm_of(args.triangle)
    u = F.unitize(args.dir)
    start = DirectedPoint.make(args.triangle, args.start, u)
    return trace(surface, start, max_length=args.max_length,
                 max_crossings=args.max_crossings, vertex_tol=args.vertex_tol)


def run(args) -> tuple[int, str]:
    """Execute one parsed command; returns ``(exit status, output text)``."""
    c = args.command
    if c == "cone-distance":
        if args.angles is not None:
            cn = TangentCone.from_angles(args.angles)
        elif args.input is not None and args.vertex is not None:
            cn = build_cone(_load(args), args.vertex)
        else:
            raise UsageError("give a surface and --vertex, or --angles")
        i, *p = args.src
        j, *q = args.dst
        path = cone_two_point_geodesic(cn, int(i), p, int(j), q)
        return 0, dumps(path.to_dict())

    surface = _load(args)
    if c == "validate":
        rep = validate(surface, samples=args.samples or 64, seed=args.seed,
                       tol=args.tol if args.tol is not None else 1e-9)
        out = rep.to_dict() | {"closed": surface.is_closed,
                               "euler_characteristic": euler_characteristic(surface),
                               "vertices": surface.vertices}
        return (0 if rep.passed else 1), dumps(out)

    if c == "trace":
        line = _trace(args, surface)
        if args.format == "svg":
            return 0, polyline_svg(surface, line)
        return 0, dumps(line.to_dict())

    if c == "curvature":
        n = args.samples or 12
        if args.vertex is not None:
            from .classify import vertex_curvature
            rows = [vertex_curvature(surface, args.vertex, n, args.sign)]
            skipped = []
        else:
            tab = curvature_table(surface, n, args.sign)
            rows, skipped = tab.rows, tab.skipped
        return 0, dumps({"curvature": [r.to_dict() | {"values": r.values} for r in rows],
                         "skipped_vertices": skipped})

    if c == "extensions":
        cn = build_cone(surface, args.vertex)
        tol = args.tol if args.tol is not None else 1e-8
        out = [extension_set(cn, d, tol).to_dict() | {"base": [d.sector, list(d.vec)]}
               for d in sample_directions(cn, args.samples or 8, args.sign)]
        return 0, dumps({"vertex": args.vertex, "sign": args.sign, "extensions": out})

    if c == "check-landsberg":
        tol = args.tol if args.tol is not None else LANDSBERG_TOL
        n = max(args.samples or 32, 16)
        rows = [{"edge": list(e), "defect": landsberg_defect(surface, e, n)}
                for e in surface.interior_edges()]
        ok = all(r["defect"] <= tol for r in rows)
        return (0 if ok else 1), dumps({"landsberg": rows, "passed": ok, "threshold": tol})

    if c == "check-berwald":
        tol = args.tol if args.tol is not None else BERWALD_TOL
        n = max(args.samples or 16, 8)
        rows = [berwald_fit(surface, e, n, tol).to_dict() for e in surface.interior_edges()]
        ok = all(r["residual"] <= tol and (r["norm_error"] is None or r["norm_error"] <= 1e-8)
                 for r in rows)
        return (0 if ok else 1), dumps({"berwald": rows, "passed": ok, "threshold": tol})

    if c == "gauss-bonnet":
        tol = args.tol if args.tol is not None else 1e-5
        gb = gauss_bonnet_check(surface, args.samples or 8, THETA_TOL, args.force)
        out = gb.to_dict() | {"threshold": tol}
        ok = gb.residual <= tol and not gb.hypothesis_violated
        return (0 if ok else 1), dumps(out)

    if c == "export":
        if args.format == "svg":
            return 0, polyline_svg(surface, _trace(args, surface))
        rep = classification_report(surface, samples=args.samples or 32, force=args.force)
        return 0, dumps(rep)

    raise UsageError(f"unknown command {c}")  # pragma: no cover


def _emit(text, path):
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status, text = run(args)
    except (UsageError, SurfaceFormatError, InvalidArgument) as exc:
        return _fail(args, 2, getattr(exc, "code", "usage"), str(exc))
    except HypothesisViolated as exc:
        return _fail(args, 1, exc.code, str(exc))
    except FinslerError as exc:
        return _fail(args, 1, exc.code, str(exc))
    _emit(text, args.out)
    return status


def _fail(args, status, code, message):
    if args.format == "json":
        sys.stderr.write(json.dumps({"error": code, "message": message}, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"pwfinsler: {code}: {message}\n")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
