"""Command-line entry point: ``bangbang <command> [options]``.

Every command is deterministic. Floats are written with 17 significant
digits so outputs round-trip exactly; CSV uses a ``.`` decimal separator
regardless of locale. Exit codes: 0 success, 1 verification failure,
2 usage or domain error.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import oracle, pmp, simulate, su2
from .errors import BangBangError
from .params import ProblemParams
from .synthesis import DEFAULT_R_FLOOR, RegimeKind, Variant, synthesize

WORKERS_ENV = "BANGBANG_WORKERS"

SWEEP_HEADER = ["r", "regime", "n_off", "total_duration", "s", "t_on", "f", "suboptimal_duration", "deviation_pct"]


class UsageError(BangBangError, ValueError):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


def _json_value(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_json_value(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    """JSON text with every float written as 17 significant digits; non-finite floats become null."""
    return _json_value(obj, indent, 0) + "\n"


def report_to_dict(report) -> dict:
    d = report.durations
    return {
        "regime": {"kind": report.regime.kind.value, "n_off": report.regime.n_off},
        "ratio": report.params.ratio,
        "detuning": report.params.detuning,
        "segments": [{"level": seg.level.value, "duration": seg.duration} for seg in report.sequence],
        "total_duration": report.total_duration,
        "modified_durations": {"s": d.s, "t_on": d.t_on, "f": d.f},
        "final_state": list(report.final_state),
        "variant": report.variant.value if report.variant is not None else None,
    }


def sequence_from_dict(data: dict):
    """Rebuild ``(params, sequence)`` from :func:`report_to_dict` output."""
    params = ProblemParams.from_ratio(float(data["ratio"]), float(data["detuning"]))
    segs = []
    for item in data["segments"]:
        if item["level"] == su2.Level.ON.value:
            segs.append(su2.FieldSegment.on(float(item["duration"]), params))
        else:
            segs.append(su2.FieldSegment.off(float(item["duration"])))
    return params, su2.build_sequence(segs)


def _params(args) -> ProblemParams:
    if args.ratio is None:
        raise UsageError("--ratio is required for this command")
    if not args.detuning > 0.0:
        raise UsageError(f"--detuning must be positive, got {args.detuning}")
    if not args.ratio > 0.0:
        raise UsageError(f"--ratio must be positive, got {args.ratio}")
    return ProblemParams.from_ratio(args.ratio, args.detuning)


def cmd_synth(args):
    report = synthesize(_params(args), variant=args.variant, r_floor=args.r_floor)
    return to_json(report_to_dict(report)), 0


def cmd_suboptimal(args):
    params = _params(args)
    report = oracle.suboptimal_sequence(params.ratio, params.detuning)
    out = report_to_dict(report)
    optimal = synthesize(params, r_floor=args.r_floor)
    out["optimal_duration"] = optimal.total_duration
    out["deviation_pct"] = 100.0 * (report.total_duration - optimal.total_duration) / optimal.total_duration
    return to_json(out), 0


def _trajectory_csv(traj):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "y", "z", "segment_index"])
    for t, v, k in zip(traj.times, traj.states, traj.segment_index):
        w.writerow([fmt(t), fmt(v[0]), fmt(v[1]), fmt(v[2]), int(k)])
    return buf.getvalue()


def cmd_simulate(args):
    params = _params(args)
    report = synthesize(params, variant=args.variant, r_floor=args.r_floor)
    if args.method == "exact":
        traj = simulate.propagate_exact(report.sequence, params, args.samples)
    else:
        dt = args.dt if args.dt is not None else report.total_duration / 1e4
        traj = simulate.propagate_ode(report.sequence, params, dt)
    if args.format == "json":
        return to_json({
            "ratio": params.ratio,
            "detuning": params.detuning,
            "method": args.method,
            "segment_boundaries": traj.segment_boundaries,
            "t": traj.times,
            "states": [list(v) for v in traj.states],
            "segment_index": [int(k) for k in traj.segment_index],
            "terminal_residual": simulate.terminal_residual(report.sequence, params),
        }), 0
    return _trajectory_csv(traj), 0


def cmd_verify(args):
    params = _params(args)
    report = synthesize(params, variant=args.variant, r_floor=args.r_floor)
    result = pmp.verify(report, params, samples_per_segment=args.samples)
    out = {"ratio": params.ratio, "detuning": params.detuning}
    out.update(result.to_dict())
    return to_json(out), 0 if result.passed else 1


def cmd_oracle(args):
    params = _params(args)
    result = oracle.brute_force(
        params.ratio, args.n_off, coarse_grid=args.grid_points, refine_iters=args.refine_iters,
        detuning=params.detuning,
    )
    optimal = synthesize(params, r_floor=args.r_floor)
    t_opt = optimal.total_duration
    t_found = result.best_duration / params.detuning
    return to_json({
        "ratio": params.ratio,
        "detuning": params.detuning,
        "n_off": result.n_off,
        "best_duration": t_found,
        "best_schedule": [{"level": s.level.value, "duration": s.duration} for s in result.best_schedule],
        "residual": result.residual,
        "evaluations": result.evaluations,
        "off_durations_over_pi": [d * params.detuning / math.pi for d in result.off_durations],
        "synthesized_duration": t_opt,
        "synthesized_n_off": optimal.regime.n_off,
        "gap_pct": 100.0 * (t_found - t_opt) / t_opt,
    }), 0


def sweep_row(r: float, r_floor: float = DEFAULT_R_FLOOR) -> list:
    """One CSV row of the sweep; failures give ``regime=error`` with empty fields."""
    try:
        report = synthesize(ProblemParams.from_ratio(r), r_floor=r_floor)
    except (BangBangError, ValueError):
        return [fmt(r), "error"] + [""] * (len(SWEEP_HEADER) - 2)
    d = report.durations
    t_on = "" if d.t_on is None else fmt(d.t_on)
    sub = dev = ""
    if report.regime.kind is not RegimeKind.SINGLE_ON:
        try:
            t_sub = oracle.suboptimal_duration(r)
        except (BangBangError, ValueError):
            pass
        else:
            sub = fmt(t_sub)
            dev = fmt(100.0 * (t_sub - d.total) / d.total)
    return [fmt(r), report.regime.kind.value, str(report.regime.n_off), fmt(d.total), fmt(d.s), t_on, fmt(d.f), sub, dev]


def _sweep_grid(args):
    lo, hi, steps = args.grid
    steps = int(steps)
    if steps < 1:
        raise UsageError("sweep needs at least one grid point")
    if not (args.r_floor <= lo < hi):
        raise UsageError(f"grid bounds must satisfy r_floor ({args.r_floor}) <= r_lo < r_hi, got {lo}, {hi}")
    if args.spacing == "log":
        grid = np.geomspace(lo, hi, steps, endpoint=not args.open)
    else:
        grid = np.linspace(lo, hi, steps, endpoint=not args.open)
    return [float(r) for r in grid]


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    cpus = os.cpu_count() or 1
    if raw is None or raw == "":
        return cpus
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, min(n, cpus))


def cmd_sweep(args):
    grid = _sweep_grid(args)
    workers = min(worker_count(), len(grid))
    floors = [args.r_floor] * len(grid)
    if workers > 1 and len(grid) >= 64:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves input order, so rows come out ascending in r.
            rows = list(pool.map(sweep_row, grid, floors, chunksize=max(1, len(grid) // (4 * workers))))
    else:
        rows = [sweep_row(r, f) for r, f in zip(grid, floors)]
    if args.format == "json":
        return to_json([dict(zip(SWEEP_HEADER, row)) for row in rows]), 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(rows)
    return buf.getvalue(), 0


COMMANDS = {
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "suboptimal": cmd_suboptimal,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bangbang", description="Minimum-time bang-bang control of a detuned qubit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ratio", type=float, help="r = omega_max / detuning")
    common.add_argument("--detuning", type=float, default=1.0, help="detuning (default 1, times are then detuning * t)")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--r-floor", type=float, default=DEFAULT_R_FLOOR, help="smallest accepted ratio")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, formats=("json",)):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--format", choices=list(formats), default=formats[0])
        return p

    p = add("synth", "optimal sequence for one ratio")
    p.add_argument("--variant", choices=[v.value for v in Variant])

    p = add("simulate", "sampled trajectory of the optimal sequence", formats=("csv", "json"))
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p.add_argument("--method", choices=["exact", "rk4"], default="exact")
    p.add_argument("--samples", type=int, default=simulate.DEFAULT_SAMPLES, help="samples per segment (exact)")
    p.add_argument("--dt", type=float, help="RK4 step (default t_f / 1e4)")

    p = add("verify", "maximum-principle certificate; exit 1 if it fails")
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p.add_argument("--samples", type=int, default=1000, help="samples per segment")

    p = add("sweep", "optimal and baseline durations over a ratio grid", formats=("csv", "json"))
    p.add_argument("--grid", nargs=3, type=float, metavar=("R_LO", "R_HI", "STEPS"), default=[0.05, 1.0, 200])
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    p.add_argument("--open", action="store_true", help="exclude R_HI from the grid")

    add("suboptimal", "baseline sequence with interior On pulses of pi")

    p = add("oracle", "brute-force search with free durations")
    p.add_argument("--n-off", type=int, default=1, choices=[0, 1, 2])
    p.add_argument("--grid-points", type=int, help="coarse grid points per dimension")
    p.add_argument("--refine-iters", type=int, default=oracle.DEFAULT_REFINE_ITERS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except (BangBangError, ValueError) as exc:
        print(f"bangbang {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
