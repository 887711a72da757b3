"""Command-line interface.

Subcommands::

    simulate       --scenario F --out F2      run one scenario, emit trajectory CSV
    verify         --runs N --seed S          randomized guaranteed-capture suite
    critical-speed --scenario F [--tol T]     smallest nu whose disc touches the targets
    two-target     --nu X --pursuer K --evader K    the two-wall chattering lab
    sweep          --nu a:b:step --out F      capture time and excess vs nu
    arena          --port P --scenario F      live session service

Exit codes: 0 all monitors pass, 1 any monitor failure or missed capture,
2 usage error (including scenario file problems).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

from .engine import Captured, SimConfig, run, run_multi, MultiPursuer, delta1_excess
from .errors import PursuitError, ScenarioError
from .games import critical_speed
from .geometry import Vec2, apollonius_disc, capture_time_bound
from .scenario_io import load_scenario, write_trajectory
from .strategies import ConstantHeadingEvader, GuaranteedPursuer
from .two_target import (
    EVADER_KINDS,
    PURSUER_KINDS,
    TwoTargetScenario,
    run_experiment,
)
from .verification import run_suite

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pursuitlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write its trajectory CSV")
    p.add_argument("--scenario", required=True, help="scenario YAML file")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("verify", help="randomized guaranteed-capture invariant suite")
    p.add_argument("--runs", type=int, default=200, help="number of random geometries")
    p.add_argument("--seed", type=int, required=True, help="suite RNG seed")
    p.add_argument("--nu-range", default="0.1:0.9", metavar="A:B",
                   help="speed-ratio sampling range (default 0.1:0.9)")

    p = sub.add_parser("critical-speed", help="bisect the critical speed ratio of a scenario")
    p.add_argument("--scenario", required=True, help="scenario YAML file (must define targets)")
    p.add_argument("--tol", type=float, default=1e-8, help="bisection tolerance")

    p = sub.add_parser("two-target", help="two-wall dispersal-surface experiment")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--pursuer", choices=PURSUER_KINDS, default="bang_bang")
    p.add_argument("--evader", choices=EVADER_KINDS, default="straight_up")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--t-max", type=float, default=60.0)
    p.add_argument("--wall-margin", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0, help="tie-break seed")
    p.add_argument("--out", help="optional trajectory CSV path")

    p = sub.add_parser("sweep", help="capture time and excess vs nu on the canonical scenario")
    p.add_argument("--nu", required=True, metavar="A:B:STEP", help="speed-ratio grid")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    p = sub.add_parser("arena", help="serve live sessions over the JSON socket protocol")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--scenario", required=True, help="scenario YAML file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--realtime-factor", type=float, default=1.0,
                   help="simulation seconds per wall-clock second")
    p.add_argument("--control-log-dir", default=None,
                   help="directory for per-session control logs (scripted evader specs)")
    p.add_argument("--frontend", default=None,
                   help="directory of built UI assets to serve at /")
    return parser


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.pursuer_starts is not None:
        return _simulate_multi(scenario)
    result = run(
        scenario.config(), scenario.x_P, scenario.x_E,
        scenario.build_pursuer(), scenario.build_evader(),
        targets=scenario.build_targets(),
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(write_trajectory(result.record))
    print(f"outcome: {result.outcome}")
    print(result.report.as_text())
    if isinstance(result.outcome, Captured) and result.record.law_active:
        ex = delta1_excess(result.record)
        print(f"capture excess beyond initial disc: {ex.excess:.6g} (delta={result.record.delta:.6g})")
        print(f"d_min at capture: {ex.d_min_final:.6g} (delta1={ex.delta1:.6g})")
    return 0 if result.report.all_passed else 1


def _simulate_multi(scenario) -> int:
    pursuers = [
        MultiPursuer(x_P0=Vec2(p[0], p[1]), nu=scenario.nu, delta=scenario.delta)
        for p in scenario.pursuer_starts
    ]
    result = run_multi(
        pursuers, scenario.x_E, scenario.build_evader(),
        evader_speed=scenario.evader_speed if scenario.evader_speed is not None else scenario.nu,
        dt=scenario.dt, t_max=scenario.t_max,
        capture_tol=scenario.capture_tol if scenario.capture_tol is not None else 1e-3,
        targets=scenario.build_targets(),
    )
    print(f"outcome: {result.outcome}")
    if isinstance(result.outcome, Captured):
        print(f"capturer: pursuer {result.capturer}")
        inside_all = all(
            result.outcome.x_f.distance_to(cap.center) <= cap.radius + 1e-6
            for cap in result.caps
        )
        print(f"capture point inside every capture disc: {inside_all}")
        return 0 if inside_all else 1
    return 1


def _cmd_verify(args) -> int:
    try:
        lo, hi = (float(v) for v in args.nu_range.split(":"))
    except ValueError:
        print(f"invalid --nu-range {args.nu_range!r}, expected A:B", file=sys.stderr)
        return 2
    suite = run_suite(args.runs, seed=args.seed, nu_range=(lo, hi))
    for line in suite.summary_lines():
        print(line)
    return 0 if suite.all_ok else 1


def _cmd_critical_speed(args) -> int:
    scenario = load_scenario(args.scenario)
    targets = scenario.build_targets()
    if targets is None:
        print("scenario defines no targets; critical speed needs a target set", file=sys.stderr)
        return 2
    value = critical_speed(scenario.x_P, scenario.x_E, targets, tol=args.tol)
    print(f"{value:.6f}")
    return 0


def _cmd_two_target(args) -> int:
    scenario = TwoTargetScenario.standard(
        nu=args.nu, wall_margin=args.wall_margin, dt=args.dt, t_max=args.t_max,
        ims_seed=args.seed,
    )
    report = run_experiment(scenario, args.pursuer, args.evader)
    print(report.as_text())
    print(report.monitors.as_text())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(write_trajectory(report.record))
    return 0 if report.monitors.all_passed else 1


def _sweep_point(nu: float) -> tuple:
    """One canonical-scenario run: pursuer (0,0), evader (0,1), straight-up evader."""
    x_P, x_E = Vec2(0.0, 0.0), Vec2(0.0, 1.0)
    ac0 = apollonius_disc(x_P, x_E, nu)
    delta = 0.1 * ac0.radius
    bound = capture_time_bound(nu, ac0.radius + delta, delta)
    t_max = 1.25 * bound + 1.0 if math.isfinite(bound) else 100.0
    config = SimConfig(dt=1e-3, t_max=t_max, nu=nu, delta=delta, capture_tol=1e-3)
    result = run(config, x_P, x_E, GuaranteedPursuer(delta=delta),
                 ConstantHeadingEvader(heading=Vec2(0.0, 1.0)))
    if isinstance(result.outcome, Captured):
        ex = delta1_excess(result.record)
        return (nu, result.outcome.kind, result.outcome.t_f, ex.excess,
                ex.d_min_final, ex.delta1, result.report.all_passed)
    return (nu, result.outcome.kind, math.nan, math.nan, math.nan, math.nan,
            result.report.all_passed)


def _sweep_worker(chunk) -> str:
    """Run a chunk of grid points and write them to a temp file (merged later)."""
    fd, path = tempfile.mkstemp(prefix="pursuitlab-sweep-", suffix=".csv")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        for nu in chunk:
            row = _sweep_point(nu)
            fh.write(",".join(format(v, ".12g") if isinstance(v, float) else str(v)
                              for v in row) + "\n")
    return path


def _cmd_sweep(args) -> int:
    try:
        lo, hi, step = (float(v) for v in args.nu.split(":"))
        if step <= 0 or hi < lo:
            raise ValueError
    except ValueError:
        print(f"invalid --nu {args.nu!r}, expected A:B:STEP with STEP > 0", file=sys.stderr)
        return 2
    grid = []
    k = 0
    while True:
        nu = lo + k * step
        if nu > hi + 1e-12:
            break
        grid.append(min(nu, hi))
        k += 1
    jobs = max(1, args.jobs)
    chunks = [grid[i::jobs] for i in range(jobs)]
    chunks = [c for c in chunks if c]
    if len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            paths = list(pool.map(_sweep_worker, chunks))
    else:
        paths = [_sweep_worker(chunks[0])] if chunks else []

    rows = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.strip().split(",")
                rows.append((float(parts[0]), line.strip()))
        os.unlink(path)
    rows.sort(key=lambda pair: pair[0])
    all_pass = True
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("nu,outcome,t_f,excess,d_min_final,delta1,monitors_pass\n")
        for _, line in rows:
            fh.write(line + "\n")
            all_pass = all_pass and line.endswith("True") and ",captured," in line
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0 if all_pass else 1


def _cmd_arena(args) -> int:
    import uvicorn

    from .arena import build_app

    scenario = load_scenario(args.scenario)
    app = build_app(
        scenario,
        realtime_factor=args.realtime_factor,
        control_log_dir=args.control_log_dir,
        frontend_dir=args.frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "verify": _cmd_verify,
        "critical-speed": _cmd_critical_speed,
        "two-target": _cmd_two_target,
        "sweep": _cmd_sweep,
        "arena": _cmd_arena,
    }
    try:
        return handlers[args.command](args)
    except ScenarioError as exc:
        for problem in exc.problems:
            print(f"scenario error: {problem}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PursuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
