"""Randomized guaranteed-capture verification suite.

Samples random geometries and speed ratios, runs the guaranteed law against
a battery of adversarial evader behaviors, and aggregates the monitor
results.  Every run is expected to end in capture with all monitors passing;
anything else is a finding.  Fully deterministic given the seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .engine import Captured, RunResult, SimConfig, run
from .geometry import Vec2, apollonius_disc, capture_time_bound, capture_disc
from .strategies import (
    ConstantHeadingEvader,
    GuaranteedPursuer,
    RadialEscapeEvader,
    ScriptedEvader,
    ToPointEvader,
)

__all__ = ["SuiteRun", "SuiteResult", "sample_geometry", "build_evaders", "run_suite"]

EVADER_LABELS = ("to_point", "constant_heading", "radial_escape", "scripted", "straight_up")

DELTA_FRACTION = 0.1  # capture-disc inflation as a fraction of the initial disc radius


@dataclass(slots=True)
class SuiteRun:
    scenario_index: int
    evader_label: str
    nu: float
    r0: float
    result: RunResult

    @property
    def ok(self) -> bool:
        return isinstance(self.result.outcome, Captured) and self.result.report.all_passed


@dataclass(slots=True)
class SuiteResult:
    runs: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.runs)

    def failures(self) -> list:
        return [r for r in self.runs if not r.ok]

    def monitor_counts(self) -> dict:
        counts: dict = {}
        for suite_run in self.runs:
            for res in suite_run.result.report:
                passed, total = counts.get(res.name, (0, 0))
                counts[res.name] = (passed + (1 if res.passed else 0), total + 1)
        return counts

    def summary_lines(self) -> list:
        captured = sum(isinstance(r.result.outcome, Captured) for r in self.runs)
        lines = [f"runs {len(self.runs)}, captured {captured}"]
        for name, (passed, total) in sorted(self.monitor_counts().items()):
            lines.append(f"{name}: {passed}/{total} pass")
        for r in self.failures():
            lines.append(
                f"FAIL scenario {r.scenario_index} evader {r.evader_label} "
                f"nu={r.nu:.4f} r0={r.r0:.4f} outcome={r.result.outcome.kind}"
            )
        return lines


def sample_geometry(rng: random.Random, nu_range=(0.1, 0.9), r_range=(0.5, 2.0)):
    """Random (x_P, x_E, nu): pursuer near the origin, evader at a random
    bearing and separation."""
    nu = rng.uniform(*nu_range)
    r0 = rng.uniform(*r_range)
    x_P = Vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
    bearing = rng.uniform(0.0, 2.0 * math.pi)
    x_E = Vec2(x_P.x + r0 * math.cos(bearing), x_P.y + r0 * math.sin(bearing))
    return x_P, x_E, nu


def build_evaders(rng: random.Random, x_P: Vec2, x_E: Vec2, nu: float) -> dict:
    """The five adversarial behaviors run against each sampled geometry."""
    ac0 = apollonius_disc(x_P, x_E, nu)
    # random interior point of the initial dominance disc
    rho = ac0.radius * math.sqrt(rng.random())
    ang = rng.uniform(0.0, 2.0 * math.pi)
    interior = Vec2(ac0.center.x + rho * math.cos(ang), ac0.center.y + rho * math.sin(ang))
    heading = rng.uniform(0.0, 2.0 * math.pi)
    segments = []
    for _ in range(rng.randint(3, 6)):
        seg_ang = rng.uniform(0.0, 2.0 * math.pi)
        segments.append((
            rng.uniform(0.5, 2.0),
            Vec2(math.cos(seg_ang), math.sin(seg_ang)),
            rng.uniform(0.5, 1.0),
        ))
    return {
        "to_point": ToPointEvader(target=interior),
        "constant_heading": ConstantHeadingEvader(heading=Vec2(math.cos(heading), math.sin(heading))),
        "radial_escape": RadialEscapeEvader(origin=x_P),
        "scripted": ScriptedEvader(segments),
        "straight_up": ConstantHeadingEvader(heading=Vec2(0.0, 1.0)),
    }


def run_suite(n_scenarios: int, seed: int, nu_range=(0.1, 0.9), r_range=(0.5, 2.0),
              dt: float = 1e-3, capture_tol: float = 1e-3,
              evader_speed_factor: float = 1.0) -> SuiteResult:
    """Run the full suite: n_scenarios geometries x five evader behaviors.

    `evader_speed_factor` < 1 scales every evader's speed cap below nu (all
    guarantees must continue to hold).  t_max is set comfortably above the
    worst-case capture-time bound so a miss shows up as a missing capture,
    not a truncated run.
    """
    rng = random.Random(seed)
    suite = SuiteResult()
    for index in range(n_scenarios):
        x_P, x_E, nu = sample_geometry(rng, nu_range, r_range)
        ac0 = apollonius_disc(x_P, x_E, nu)
        delta = DELTA_FRACTION * ac0.radius
        cap = capture_disc(ac0, delta)
        bound = capture_time_bound(nu, cap.radius, delta)
        t_max = 1.25 * bound + 1.0 if math.isfinite(bound) else 100.0
        config = SimConfig(
            dt=dt, t_max=t_max, nu=nu, delta=delta, capture_tol=capture_tol,
            evader_speed=evader_speed_factor * nu if evader_speed_factor != 1.0 else None,
        )
        for label, evader in build_evaders(rng, x_P, x_E, nu).items():
            result = run(config, x_P, x_E, GuaranteedPursuer(delta=delta), evader)
            suite.runs.append(SuiteRun(
                scenario_index=index, evader_label=label, nu=nu,
                r0=x_E.distance_to(x_P), result=result,
            ))
    return suite
