"""Command-line front end.

Subcommands: list-systems | run | distances | closeness | lyapunov.
``run`` executes the sequential test and emits a CSV table plus a JSON run
manifest that suffices to reproduce the run bit for bit
(``run --from-manifest``).  ``distances`` and ``closeness`` emit plot-ready
delimited series; nothing here renders images.

Exit codes: 0 success/confirmed, 2 test truncated, 1 runtime error,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .core import DivergenceError, TestConfig, format_float
from .dynamics import (
    REGISTRY_NAMES,
    integrate_rk4,
    iterate_map,
    load_system_file,
    lookup_system,
    registry_to_dicts,
    system_from_dict,
)
from .lyapunov import largest_lyapunov_flow, largest_lyapunov_map
from .seqtest import (
    closeness_intervals,
    coordinate_distance_series,
    dominant_coordinate,
    exceedances,
    run_sequential_test,
    shift_distance_series,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TRUNCATED = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse with the conventional usage-error exit status."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


class _UsageError(Exception):
    pass


def _add_common(p):
    p.add_argument("--system", metavar="NAME",
                   help=f"built-in system ({', '.join(REGISTRY_NAMES)})")
    p.add_argument("--system-file", metavar="PATH",
                   help="JSON definition: family, parameters, initial_condition")
    p.add_argument("--eps0", type=float, help="separation threshold (default: registry)")
    p.add_argument("--tfix", type=float, help="convergence time cutoff (default: registry)")
    p.add_argument("--dt", type=float, default=0.01, help="flow grid spacing (default 0.01)")
    p.add_argument("--horizon", type=int, help="grid steps to generate/search")
    p.add_argument("--seed", help="reserved; every computation is deterministic")


def _resolve_entry(args):
    if args.system and args.system_file:
        raise _UsageError("--system and --system-file are mutually exclusive")
    try:
        if args.system:
            return lookup_system(args.system), args.system
        if args.system_file:
            entry = load_system_file(args.system_file)
            return entry, entry.system.name
    except (ValueError, OSError) as e:
        raise _UsageError(str(e)) from None
    raise _UsageError("one of --system or --system-file is required")


def _build_trajectory(entry, args, horizon):
    system = entry.system
    if system.kind == "map":
        return iterate_map(system, entry.initial_condition, horizon)
    return integrate_rk4(system, entry.initial_condition, args.dt, horizon)


def _grid_decimals(h: float):
    s = repr(float(h))
    if "e" in s or "E" in s:
        return None
    return len(s.split(".")[1]) if "." in s else 0


def _grid_value_str(index: int, h: float, t0: float, discrete: bool) -> str:
    if discrete:
        return str(int(index))
    dec = _grid_decimals(h)
    t = t0 + index * h
    return format_float(t) if dec is None else f"{t:.{dec}f}"


def _system_manifest(entry, name):
    system = entry.system
    return {
        "name": name,
        "family": system.family,
        "kind": system.kind,
        "dimension": system.dimension,
        "parameters": dict(system.parameters),
        "initial_condition": [float(v) for v in entry.initial_condition],
    }


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


# -- run -----------------------------------------------------------------

def _run_csv_lines(outcome, h, t0, discrete, rows=None):
    conv = outcome.convergence
    sep = outcome.separation
    ks = list(range(1, len(conv) + 1)) if rows is None else rows
    lines = ["n,k,inv_k,conv,sep,delta,sep_distance"]
    for rowno, k in enumerate(ks, start=1):
        c = conv[k - 1]
        conv_str = _grid_value_str(c.index, h, t0, discrete)
        if k - 1 < len(sep):
            s = sep[k - 1]
            sep_str = _grid_value_str(s.index, h, t0, discrete)
            dist_str = format_float(s.distance)
        else:
            sep_str = ""
            dist_str = ""
        lines.append(
            f"{rowno},{k},{format_float(1.0 / k)},{conv_str},{sep_str},"
            f"{format_float(c.delta)},{dist_str}"
        )
    return lines


def cmd_run(args):
    if args.from_manifest:
        if args.system or args.system_file:
            raise _UsageError("--from-manifest replaces --system/--system-file")
        with open(args.from_manifest, "r", encoding="utf-8") as f:
            manifest = json.load(f)
        entry = system_from_dict(manifest["system"])
        name = manifest["system"].get("name", entry.system.name)
        cfg = manifest["config"]
        eps0, t_fix = cfg["eps0"], cfg["t_fix"]
        horizon, k_max = int(cfg["horizon"]), int(cfg["k_max"])
        args.dt = float(cfg["dt"])
    else:
        entry, name = _resolve_entry(args)
        eps0 = args.eps0 if args.eps0 is not None else entry.eps0
        if eps0 is None:
            raise _UsageError(f"system {name!r} carries no eps0; pass --eps0")
        t_fix = args.tfix if args.tfix is not None else entry.t_fix
        if args.horizon is None:
            raise _UsageError("--horizon is required")
        if args.k_max is None:
            raise _UsageError("--k-max is required")
        horizon, k_max = args.horizon, args.k_max

    config = TestConfig(eps0=float(eps0), t_fix=float(t_fix), horizon=horizon, k_max=k_max)
    started = time.perf_counter()
    traj = _build_trajectory(entry, args, horizon)
    outcome = run_sequential_test(traj, config)
    duration = time.perf_counter() - started

    discrete = entry.system.kind == "map"
    largest = (_grid_value_str(outcome.convergence[-1].index, traj.h, traj.t0, discrete)
               if outcome.convergence else "-")
    print(f"system: {name} ({entry.system.kind}, dimension {entry.system.dimension})")
    print(f"config: eps0={format_float(config.eps0)} t_fix={format_float(config.t_fix)} "
          f"horizon={config.horizon} k_max={config.k_max}")
    print(f"status: {outcome.status}  pairs: {outcome.k_reached}  "
          f"largest convergence value: {largest}")

    rows = None
    if args.rows:
        rows = [int(r) for r in args.rows.split(",") if r]
        bad = [r for r in rows if not 1 <= r <= len(outcome.convergence)]
        if bad:
            raise _UsageError(f"--rows entries out of range 1..{len(outcome.convergence)}: {bad}")
    if args.csv:
        _write_lines(args.csv, _run_csv_lines(outcome, traj.h, traj.t0, discrete, rows))
    if args.out:
        manifest = {
            "tool_version": __version__,
            "system": {**_system_manifest(entry, name), "eps0": float(eps0),
                       "t_fix": float(t_fix)},
            "config": {"eps0": float(eps0), "t_fix": float(t_fix), "dt": traj.h,
                       "horizon": horizon, "k_max": k_max},
            "outcome": {
                "status": str(outcome.status),
                "status_kind": outcome.status.kind,
                "status_index": outcome.status.index,
                "pairs": outcome.k_reached,
                "duration_seconds": duration,
            },
            "tables": {
                "convergence": [
                    {"k": c.n, "index": c.index, "value": c.value, "delta": c.delta}
                    for c in outcome.convergence
                ],
                "separation": [
                    {"k": s.n, "index": s.index, "value": s.value, "distance": s.distance}
                    for s in outcome.separation
                ],
            },
        }
        _write_json(args.out, manifest)
    return EXIT_OK if outcome.status.is_confirmed else EXIT_TRUNCATED


# -- distances -----------------------------------------------------------

def _resolve_gamma(args):
    if args.gamma is not None and args.from_manifest:
        raise _UsageError("--gamma and --from-manifest are mutually exclusive")
    if args.gamma is not None:
        return args.gamma
    if args.from_manifest:
        if args.entry is None:
            raise _UsageError("--from-manifest needs --entry K")
        with open(args.from_manifest, "r", encoding="utf-8") as f:
            manifest = json.load(f)
        for row in manifest["tables"]["convergence"]:
            if row["k"] == args.entry:
                return int(row["index"])
        raise _UsageError(f"manifest has no convergence entry k={args.entry}")
    raise _UsageError("one of --gamma or --from-manifest/--entry is required")


def cmd_distances(args):
    entry, name = _resolve_entry(args)
    if args.horizon is None:
        raise _UsageError("--horizon is required")
    gamma = _resolve_gamma(args)
    traj = _build_trajectory(entry, args, args.horizon)
    full = shift_distance_series(traj, gamma)
    coord = args.coord
    if not 0 <= coord < traj.dimension:
        raise _UsageError(f"--coord {coord} out of range for dimension {traj.dimension}")
    per_coord = coordinate_distance_series(traj, gamma, coord)

    discrete = entry.system.kind == "map"
    label = "index" if discrete else "time"
    lines = [f"{label},d_full,d_coord{coord}"]
    for i in range(len(full)):
        lines.append(
            f"{_grid_value_str(i, traj.h, traj.t0, discrete)},"
            f"{format_float(full.values[i])},{format_float(per_coord.values[i])}"
        )
    _write_lines(args.csv, lines)

    print(f"system: {name}  shift: {gamma} grid steps  series length: {len(full)}")
    if args.probe is not None:
        dom = dominant_coordinate(traj, gamma, args.probe)
        print(f"dominant coordinate at probe {args.probe}: {dom}")
    if args.exceedances_out:
        eps0 = args.eps0 if args.eps0 is not None else entry.eps0
        if eps0 is None:
            raise _UsageError("exceedance report needs --eps0")
        upto = args.upto if args.upto is not None else len(per_coord)
        exc = exceedances(per_coord, float(eps0), upto)
        out = [f"{label},distance"]
        out.extend(
            f"{_grid_value_str(i, traj.h, traj.t0, discrete)},{format_float(d)}"
            for i, d in exc
        )
        _write_lines(args.exceedances_out, out)
        print(f"exceedances above {format_float(float(eps0))} before {upto}: {len(exc)}")
    return EXIT_OK


# -- closeness -----------------------------------------------------------

def cmd_closeness(args):
    entry, name = _resolve_entry(args)
    if args.horizon is None:
        raise _UsageError("--horizon is required")
    if args.gamma is None:
        raise _UsageError("--gamma is required")
    try:
        lo, hi = (int(v) for v in args.window.split(":"))
    except ValueError:
        raise _UsageError("--window must be LO:HI grid indices") from None
    traj = _build_trajectory(entry, args, args.horizon)
    if args.coord is not None:
        series = coordinate_distance_series(traj, args.gamma, args.coord)
        what = f"coordinate {args.coord}"
    else:
        series = shift_distance_series(traj, args.gamma)
        what = "full state"
    report = closeness_intervals(series, args.threshold, (lo, hi))

    discrete = entry.system.kind == "map"
    print(f"system: {name}  shift: {args.gamma}  series: {what}  "
          f"window: [{lo}, {hi}]  threshold: {format_float(report.threshold)}")
    for a, b in report.intervals:
        if discrete:
            print(f"interval: [{a}, {b}]")
        else:
            ta = _grid_value_str(a, traj.h, traj.t0, False)
            tb = _grid_value_str(b, traj.h, traj.t0, False)
            print(f"interval: [{a}, {b}] (t = {ta} .. {tb})")
    print(f"max distance on intervals: {format_float(report.max_distance_on_intervals)}")
    if args.csv:
        lines = ["start_index,end_index,start_value,end_value,max_distance"]
        for a, b in report.intervals:
            seg = series.values[a:b + 1].max()
            lines.append(
                f"{a},{b},{_grid_value_str(a, traj.h, traj.t0, discrete)},"
                f"{_grid_value_str(b, traj.h, traj.t0, discrete)},{format_float(float(seg))}"
            )
        _write_lines(args.csv, lines)
    return EXIT_OK


# -- lyapunov ------------------------------------------------------------

def cmd_lyapunov(args):
    entry, name = _resolve_entry(args)
    system = entry.system
    if system.kind == "map":
        transient = args.transient if args.transient is not None else 1000
        est = largest_lyapunov_map(system, entry.initial_condition, args.steps,
                                   transient=transient)
        units = "nats/iteration"
    else:
        transient = args.transient if args.transient is not None else 10000
        est = largest_lyapunov_flow(system, entry.initial_condition, args.dt,
                                    args.steps, transient=transient,
                                    renorm_interval=args.renorm)
        units = "nats/time unit"
    print(f"{name}: largest Lyapunov exponent = {format_float(est.exponent)} ({units})")
    if args.out:
        _write_json(args.out, {
            "system": name,
            "kind": system.kind,
            "exponent": est.exponent,
            "units": units,
            "n_steps": est.n_steps,
            "transient_skipped": est.transient_skipped,
            "renorm_interval": est.renorm_interval,
        })
    return EXIT_OK


# -- list-systems ----------------------------------------------------------

def cmd_list_systems(args):
    entries = registry_to_dicts()
    if args.json:
        print(json.dumps(entries, indent=2))
        return EXIT_OK
    for e in entries:
        ic = ", ".join(format_float(v) for v in e["initial_condition"])
        params = ", ".join(f"{k}={format_float(v)}" for k, v in e["parameters"].items())
        print(f"{e['name']:16s} {e['kind']:4s} dim={e['dimension']}  "
              f"eps0={format_float(e['eps0'])}  t_fix={format_float(e['t_fix'])}  "
              f"ic=({ic})  params: {params}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="seqchaos",
                     description="Sequential test for chaos on maps and flows")
    parser.add_argument("--version", action="version", version=f"seqchaos {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("list-systems", help="show the built-in system registry")
    p.add_argument("--json", action="store_true", help="machine-readable dump")
    p.set_defaults(func=cmd_list_systems)

    p = sub.add_parser("run", help="run the sequential test")
    _add_common(p)
    p.add_argument("--k-max", type=int, dest="k_max", help="threshold indices to attempt")
    p.add_argument("--csv", metavar="PATH", help="write the result table")
    p.add_argument("--out", metavar="PATH", help="write the JSON run manifest")
    p.add_argument("--rows", metavar="K1,K2,…", help="select table rows by threshold index")
    p.add_argument("--from-manifest", metavar="PATH",
                   help="re-run the experiment recorded in a manifest")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("distances", help="shift-distance series and exceedances")
    _add_common(p)
    p.add_argument("--gamma", type=int, help="shift in grid steps")
    p.add_argument("--from-manifest", metavar="PATH",
                   help="take the shift from a manifest convergence entry")
    p.add_argument("--entry", type=int, metavar="K", help="threshold index in the manifest")
    p.add_argument("--coord", type=int, default=0, help="coordinate for the d_coord column")
    p.add_argument("--upto", type=int, help="exceedance scan bound (default: series length)")
    p.add_argument("--probe", type=int, help="print the dominant coordinate at this index")
    p.add_argument("--csv", metavar="PATH", required=True, help="series output")
    p.add_argument("--exceedances", dest="exceedances_out", metavar="PATH",
                   help="write the exceedance list")
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("closeness", help="sub-threshold intervals of a shift comparison")
    _add_common(p)
    p.add_argument("--gamma", type=int, help="shift in grid steps")
    p.add_argument("--window", required=True, metavar="LO:HI", help="grid index window")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--coord", type=int, help="use one coordinate (default: full state)")
    p.add_argument("--csv", metavar="PATH", help="write the interval table")
    p.set_defaults(func=cmd_closeness)

    p = sub.add_parser("lyapunov", help="largest Lyapunov exponent")
    _add_common(p)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--transient", type=int, help="steps to discard (default 1e3 map / 1e4 flow)")
    p.add_argument("--renorm", type=int, default=10, help="flow renormalization interval")
    p.add_argument("--out", metavar="PATH", help="write a JSON summary")
    p.set_defaults(func=cmd_lyapunov)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.error("a command is required")
        if getattr(args, "seed", None) is not None:
            parser.error("--seed is reserved: every computation is deterministic")
        try:
            return args.func(args)
        except _UsageError as e:
            parser.error(str(e))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def entry():
    raise SystemExit(main())
