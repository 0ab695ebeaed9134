"""Command-line front end.

Exit codes: 0 success, 1 geometric nonexistence, 2 bad arguments,
3 solver failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from nilpack import geodesics, meshes, packing, tilings
from nilpack.core import NilDomainError, NilPoint

EXIT_OK, EXIT_NONEXISTENT, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4

TABLE_HEADER = ("radius", "prism_volume", "density", "kissing_number")
SWEEP_HEADER = ("x", "radius", "prism_volume", "density", "kissing_number", "error")


class UsageError(Exception):
    pass


def parse_x_range(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise UsageError(f"--x-range expects LO:HI:STEPS, got {text!r}") from exc
    if not (0 < lo < hi) or steps < 2:
        raise UsageError(f"empty x-range {text!r}")
    return lo, hi, steps


def _fmt(v: float, precision: int) -> str:
    return f"{v:.{precision}f}"


def _scalar(v: float, precision: int) -> str:
    """Round to ``precision`` significant digits, keep a float-looking repr."""
    return repr(float(f"{v:.{precision}g}"))


def _table_csv(rows, precision: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for r in rows:
        w.writerow([_fmt(r.r_opt, precision), _fmt(r.prism_volume, precision),
                    _fmt(r.density, precision), r.kissing_number])
    return buf.getvalue()


def _result_dict(r: packing.PackingResult) -> dict:
    return {"x": r.x, "r_opt": r.r_opt, "prism_volume": r.prism_volume,
            "density": r.density, "kissing": r.kissing_number}


def _emit(args, text: str):
    if args.out:
        try:
            with open(args.out, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _require_format(args, allowed):
    if args.format is not None and args.format not in allowed:
        raise UsageError(f"{args.command} does not support --format {args.format}")


def _require_tiling(p, q):
    if not tilings.tiling_exists(p, q):
        raise tilings.TilingError(f"no regular prism tiling with (p, q) = ({p}, {q})")


def cmd_exists(args):
    ok = tilings.tiling_exists(args.p, args.q)
    print("true" if ok else "false")
    return EXIT_OK if ok else EXIT_NONEXISTENT


def cmd_optimize(args):
    _require_format(args, ("json",))
    _require_tiling(args.p, args.q)
    sol = packing.solve_balanced(args.p, args.q)
    r = sol.result
    record = {"p": r.p, "q": r.q, "x_star": sol.x_star, "r_opt": r.r_opt,
              "prism_volume": r.prism_volume, "density": r.density,
              "kissing": r.kissing_number}
    return _emit(args, json.dumps(record, indent=2) + "\n")


def cmd_table(args):
    _require_format(args, ("csv",))
    _require_tiling(args.p, args.q)
    if args.x_range:
        lo, hi, steps = parse_x_range(args.x_range)
        rows = [pt.result for pt in packing.sweep(args.p, args.q, lo, hi, steps) if pt.result]
    else:
        rows = packing.table_rows(args.p, args.q)
    return _emit(args, _table_csv(rows, args.precision))


def cmd_sweep(args):
    _require_format(args, ("csv", "json"))
    _require_tiling(args.p, args.q)
    if not args.x_range:
        raise UsageError("sweep needs --x-range LO:HI:STEPS")
    lo, hi, steps = parse_x_range(args.x_range)
    points = packing.sweep(args.p, args.q, lo, hi, steps)
    if args.format == "json":
        data = [dict(_result_dict(pt.result), error=None) if pt.result
                else {"x": pt.x, "error": pt.error} for pt in points]
        return _emit(args, json.dumps(data, indent=2) + "\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    prec = args.precision
    for pt in points:
        if pt.result is None:
            w.writerow([_fmt(pt.x, prec), "", "", "", "", pt.error])
        else:
            r = pt.result
            w.writerow([_fmt(pt.x, prec), _fmt(r.r_opt, prec), _fmt(r.prism_volume, prec),
                        _fmt(r.density, prec), r.kissing_number, ""])
    return _emit(args, buf.getvalue())


def cmd_distance(args):
    sol = geodesics.distance(NilPoint(*args.p1), NilPoint(*args.p2))
    return _emit(args, _scalar(sol.length, args.precision) + "\n")


def cmd_volume(args):
    return _emit(args, _scalar(geodesics.ball_volume(args.radius), args.precision) + "\n")


def cmd_verify(args):
    _require_tiling(args.p, args.q)
    x = args.x if args.x is not None else 1.0
    t = tilings.build_tiling(args.p, args.q, x)
    rep = tilings.verify_relations(t, samples=args.samples, seed=args.seed)
    lines = [
        f"p={args.p} q={args.q} x={x!r} samples={rep.samples} seed={args.seed}",
        f"a^p            {rep.a_power:.3e}",
        f"b^q            {rep.b_power:.3e}",
        f"ababABAB       {rep.commutator:.3e}",
        f"abab vs baba   {rep.tau_symmetry:.3e}",
        f"fibre residual {rep.fibre_condition:.3e}",
        f"max relator deviation {rep.max_relator_deviation:.3e}",
    ]
    return _emit(args, "\n".join(lines) + "\n")


def _resolution(res: int) -> tuple[int, int]:
    n_theta = max(4, (res // 2) & ~1)
    return n_theta, max(4, res)


def cmd_mesh(args):
    _require_format(args, ("obj",))
    n_theta, n_phi = _resolution(args.res)
    if args.kind == "sphere":
        if args.radius is None:
            raise UsageError("mesh sphere needs --radius")
        if not geodesics.sphere_exists(args.radius):
            raise geodesics.SphereNonexistenceError(f"no geodesic sphere of radius {args.radius}")
        mesh = geodesics.sphere_mesh(args.radius, n_theta, n_phi)
    else:
        if args.p is None or args.q is None:
            raise UsageError(f"mesh {args.kind} needs P Q")
        _require_tiling(args.p, args.q)
        x = args.x if args.x is not None else packing.solve_balanced(args.p, args.q).x_star
        t = tilings.build_tiling(args.p, args.q, x)
        if args.kind == "prism":
            mesh = meshes.prism_mesh(t)
        else:
            mesh, n_balls = meshes.arrangement_mesh(t, n_theta, n_phi)
            print(f"balls: {n_balls}", file=sys.stderr)
    return _emit(args, meshes.format_obj(mesh))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    common.add_argument("--format", choices=("csv", "json", "obj"))
    common.add_argument("--precision", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="nilpack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def pq(sp, optional=False):
        kw = {"nargs": "?", "default": None} if optional else {}
        sp.add_argument("p", type=int, **kw)
        sp.add_argument("q", type=int, **kw)

    sp = sub.add_parser("exists", parents=[common], help="does the prism tiling T_p(q) exist")
    pq(sp)
    sp.set_defaults(func=cmd_exists)

    sp = sub.add_parser("optimize", parents=[common], help="balanced packing as JSON")
    pq(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("table", parents=[common], help="radius/volume/density/kissing CSV")
    pq(sp)
    sp.add_argument("--x-range", metavar="LO:HI:STEPS")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("sweep", parents=[common], help="packing results over an x grid")
    pq(sp)
    sp.add_argument("--x-range", metavar="LO:HI:STEPS")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("distance", parents=[common], help="geodesic distance between two points")
    sp.add_argument("coords", type=float, nargs=6, metavar="C")
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("volume", parents=[common], help="geodesic ball volume")
    sp.add_argument("radius", type=float)
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("verify", parents=[common], help="check the group relations numerically")
    pq(sp)
    sp.add_argument("--x", type=float)
    sp.add_argument("--samples", type=int, default=100)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("mesh", parents=[common], help="OBJ export of spheres, prisms, arrangements")
    sp.add_argument("kind", choices=("sphere", "prism", "arrangement"))
    pq(sp, optional=True)
    sp.add_argument("--radius", type=float)
    sp.add_argument("--x", type=float)
    sp.add_argument("--res", type=int, default=32)
    sp.set_defaults(func=cmd_mesh)
    return parser


_DEFAULT_PRECISION = {"table": 4, "sweep": 4, "distance": 12, "volume": 12}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.precision is None:
        args.precision = _DEFAULT_PRECISION.get(args.command, 4)
    if args.command == "distance":
        args.p1, args.p2 = args.coords[:3], args.coords[3:]
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (tilings.TilingError, geodesics.SphereNonexistenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONEXISTENT
    except packing.SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for x, g in exc.profile:
            print(f"  x={x:.6g} value={g:.6g}", file=sys.stderr)
        return EXIT_SOLVER
    except geodesics.DistanceRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except NilDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
