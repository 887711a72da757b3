"""Two-wall guarding lab: dispersal-surface chattering and its resolution.

The scenario: two vertical target walls at x = +-wall_x, both agents starting
on the midline, so the state begins exactly on the dispersal surface where
the naive guarding law (head to the disc edge nearest a wall) is undefined.
Against an evader that simply runs straight up, that law chatters across the
surface every step; for speed ratios above ~0.786 the agent gap then grows at
about nu - 1/sqrt(1 + nu^2) per unit time until the dominance disc swallows a
wall and the evader wins outright.  The same start under the guaranteed law
is just another capture.

Experiments return a DivergenceReport with the fitted gap growth rate (least
squares on log ||r|| over the pre-intersection window), chattering statistics,
and the run outcome.  Chattering is emulated in discrete time; flip counts
depend on dt, which the report carries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, GeometryError
from .engine import (
    COLUMNS,
    MonitorReport,
    Outcome,
    SimConfig,
    Simulation,
    TrajectoryRecord,
    max_heading_step_angle,
    monitor_suite,
)
from .games import TargetSet, VerticalLineTarget
from .geometry import Vec2, apollonius_disc, check_speed_ratio
from .strategies import (
    BangBangPursuer,
    DeadzonePursuer,
    GameState,
    GuaranteedPursuer,
    lateral_aim_points,
    pure_pursuit_direction,
)

__all__ = [
    "TwoTargetScenario",
    "DivergenceReport",
    "aim_points",
    "predicted_divergence_rate",
    "threshold_nu",
    "run_experiment",
    "wall_gaps",
    "AimPointEvader",
    "StraightUpThenWallEvader",
    "WallPursuerWithFallback",
    "PURSUER_KINDS",
    "EVADER_KINDS",
]

PURSUER_KINDS = ("bang_bang", "deadzone", "guaranteed")
EVADER_KINDS = ("aim_I1", "aim_I2", "straight_up")

# Window for the growth-rate fit: from the start until the disc first closes
# to this fraction of its initial wall gap, with the leading transient
# fraction of steps discarded.
FIT_WALL_FRACTION = 0.10
FIT_TRANSIENT_FRACTION = 0.05

SINGULAR_START_TOL = 1e-12


@dataclass(slots=True)
class TwoTargetScenario:
    """Singular-start two-wall scenario: both agents on the midline x = 0."""

    wall_x: float
    x_P: Vec2
    x_E: Vec2
    nu: float
    dt: float = 1e-4
    t_max: float = 60.0
    tie_break: str = "seeded_coin"
    ims_seed: int = 0
    deadzone_commit: Optional[float] = None
    deadzone_trigger: Optional[float] = None

    def __post_init__(self):
        check_speed_ratio(self.nu, upper=0.99 + 1e-12)
        if self.wall_x <= 0:
            raise DomainError(f"wall_x must be positive, got {self.wall_x}")
        scale = max(1.0, self.x_P.distance_to(self.x_E))
        if abs(self.x_P.x) > SINGULAR_START_TOL * scale or abs(self.x_E.x) > SINGULAR_START_TOL * scale:
            raise DomainError("two-target scenario must start on the midline (dispersal surface)")
        _, _, d1, d2 = lateral_aim_points(apollonius_disc(self.x_P, self.x_E, self.nu), self.wall_x)
        if d1 <= 0 or d2 <= 0:
            raise DomainError("initial dominance disc already touches a wall; game decided")

    @classmethod
    def standard(cls, nu: float, wall_margin: float = 0.3, dt: float = 1e-4,
                 t_max: float = 60.0, **kwargs) -> "TwoTargetScenario":
        """Canonical geometry: pursuer (0,0), evader (0,0.8), walls at the
        initial disc's lateral extent plus `wall_margin`."""
        x_P = Vec2(0.0, 0.0)
        x_E = Vec2(0.0, 0.8)
        ac = apollonius_disc(x_P, x_E, nu)
        wall_x = ac.center.x + ac.radius + wall_margin
        return cls(wall_x=wall_x, x_P=x_P, x_E=x_E, nu=nu, dt=dt, t_max=t_max, **kwargs)

    def targets(self) -> TargetSet:
        return TargetSet([VerticalLineTarget(-self.wall_x), VerticalLineTarget(self.wall_x)])

    def initial_gaps(self) -> tuple:
        _, _, d1, d2 = lateral_aim_points(apollonius_disc(self.x_P, self.x_E, self.nu), self.wall_x)
        return d1, d2


@dataclass(slots=True)
class DivergenceReport:
    """Growth-rate and chattering statistics of one two-wall run."""

    r_series: list
    fitted_rate: float
    predicted_rate: float
    flip_count: int
    near_surface_steps: int
    near_surface_flips: int
    max_heading_step_angle: float
    outcome: Outcome
    record: TrajectoryRecord
    monitors: MonitorReport
    fit_window: tuple

    def as_text(self) -> str:
        lines = [
            f"outcome {self.outcome.kind}",
            f"fitted_rate {self.fitted_rate:.6g}",
            f"predicted_rate {self.predicted_rate:.6g}",
            f"flips {self.flip_count} (near surface {self.near_surface_flips}/{self.near_surface_steps})",
            f"max_heading_step_angle {self.max_heading_step_angle:.6g} rad",
            f"fit_window rows [{self.fit_window[0]}, {self.fit_window[1]})",
        ]
        return "\n".join(lines)


def aim_points(state: GameState, wall_x: float) -> tuple:
    """(I1, I2, d1, d2) for the current disc; error once a wall is touched."""
    i1, i2, d1, d2 = lateral_aim_points(state.ac, wall_x)
    if d1 <= 0 or d2 <= 0:
        raise GeometryError(
            f"dominance disc touches a wall (d1={d1:.6g}, d2={d2:.6g}); game decided"
        )
    return i1, i2, d1, d2


def predicted_divergence_rate(nu: float) -> float:
    """Gap growth rate nu - 1/sqrt(1 + nu^2) of the chattering naive law.

    Derived for the straight-up evader against the surface-straddling
    bang-bang pursuer, whose heading makes cos(psi) = 1/sqrt(1 + nu^2) with
    the line of sight.  Positive above `threshold_nu()`.
    """
    if not (isinstance(nu, (int, float)) and 0.0 < nu < 1.0):
        raise DomainError(f"need 0 < nu < 1, got {nu!r}")
    return nu - 1.0 / math.sqrt(1.0 + nu * nu)


def threshold_nu() -> float:
    """Speed ratio where the chattering divergence rate changes sign.

    The positive root of nu^4 + nu^2 - 1 = 0: sqrt((sqrt(5) - 1) / 2).
    """
    return math.sqrt((math.sqrt(5.0) - 1.0) / 2.0)


class WallPursuerWithFallback:
    """Run a wall-aware law until the geometry is decided, then chase.

    Once the disc touches a wall the naive laws are undefined; the lab keeps
    the run alive by dropping to pure pursuit, which cannot prevent the
    now-guaranteed evader win but lets it play out.
    """

    __slots__ = ("inner", "decided")

    def __init__(self, inner):
        self.inner = inner
        self.decided = False

    def direction(self, state: GameState) -> Vec2:
        if not self.decided:
            try:
                return self.inner.direction(state)
            except GeometryError:
                self.decided = True
        return pure_pursuit_direction(state)


class StraightUpThenWallEvader:
    """Pure evasion straight up; commit to the nearest breached wall point
    the first step the disc pokes through a wall."""

    __slots__ = ("wall_x", "target")

    def __init__(self, wall_x: float):
        self.wall_x = wall_x
        self.target = None

    def velocity(self, state: GameState, speed: float) -> Vec2:
        if self.target is None:
            _, _, d1, d2 = lateral_aim_points(state.ac, self.wall_x)
            if d1 <= 0.0 or d2 <= 0.0:
                wx = -self.wall_x if d1 <= d2 else self.wall_x
                self.target = Vec2(wx, state.ac.center.y)
            else:
                return Vec2(0.0, speed)
        d = self.target - state.x_E
        dist = d.norm()
        if dist == 0.0:
            return Vec2(0.0, 0.0)
        return Vec2(d.x / dist * speed, d.y / dist * speed)


class AimPointEvader:
    """Head to the current disc edge point I1 or I2 at full speed."""

    __slots__ = ("side", "wall_x")

    def __init__(self, side: int, wall_x: float):
        if side not in (1, 2):
            raise DomainError(f"side must be 1 or 2, got {side}")
        self.side = side
        self.wall_x = wall_x

    def velocity(self, state: GameState, speed: float) -> Vec2:
        i1, i2, _, _ = lateral_aim_points(state.ac, self.wall_x)
        aim = i1 if self.side == 1 else i2
        d = aim - state.x_E
        dist = d.norm()
        if dist == 0.0:
            return Vec2(0.0, 0.0)
        return Vec2(d.x / dist * speed, d.y / dist * speed)


def _build_pursuer(scenario: TwoTargetScenario, kind: str):
    if kind == "bang_bang":
        return WallPursuerWithFallback(BangBangPursuer(
            wall_x=scenario.wall_x, tie_break=scenario.tie_break, ims_seed=scenario.ims_seed,
        ))
    if kind == "deadzone":
        scale = max(1.0, scenario.x_P.distance_to(scenario.x_E))
        trigger = scenario.deadzone_trigger if scenario.deadzone_trigger is not None else 0.01 * scale
        commit = scenario.deadzone_commit
        if commit is None:
            commit = 2.0 * trigger / (1.0 - scenario.nu)
        inner = BangBangPursuer(
            wall_x=scenario.wall_x, tie_break=scenario.tie_break, ims_seed=scenario.ims_seed,
        )
        return WallPursuerWithFallback(DeadzonePursuer(
            inner=inner, commit_time=commit, trigger_width=trigger,
        ))
    if kind == "guaranteed":
        d1, d2 = scenario.initial_gaps()
        return GuaranteedPursuer(delta=0.5 * min(d1, d2))
    raise DomainError(f"unknown pursuer kind {kind!r}; expected one of {PURSUER_KINDS}")


def _build_evader(scenario: TwoTargetScenario, kind: str):
    if kind == "straight_up":
        return StraightUpThenWallEvader(scenario.wall_x)
    if kind == "aim_I1":
        return AimPointEvader(1, scenario.wall_x)
    if kind == "aim_I2":
        return AimPointEvader(2, scenario.wall_x)
    raise DomainError(f"unknown evader kind {kind!r}; expected one of {EVADER_KINDS}")


def wall_gaps(record: TrajectoryRecord, wall_x: float) -> tuple:
    """Per-row wall gaps (d1, d2) recovered from the logged disc geometry."""
    i_xa, i_ra = COLUMNS.index("xA"), COLUMNS.index("R_A")
    d1 = [row[i_xa] - row[i_ra] + wall_x for row in record.rows]
    d2 = [wall_x - (row[i_xa] + row[i_ra]) for row in record.rows]
    return d1, d2


def _sign(x: float) -> int:
    return 1 if x > 0.0 else (-1 if x < 0.0 else 0)


def run_experiment(scenario: TwoTargetScenario, pursuer_kind: str, evader_kind: str) -> DivergenceReport:
    """Run one lab configuration and compute its divergence statistics."""
    d1_0, d2_0 = scenario.initial_gaps()
    config = SimConfig(
        dt=scenario.dt,
        t_max=scenario.t_max,
        nu=scenario.nu,
        delta=0.5 * min(d1_0, d2_0),
    )
    sim = Simulation(
        config, scenario.x_P, scenario.x_E,
        _build_pursuer(scenario, pursuer_kind),
        _build_evader(scenario, evader_kind),
        targets=scenario.targets(),
    )
    outcome = sim.run_to_end()
    record = sim.record()
    rows = record.rows
    r = record.r_norms()

    # Pre-intersection fit window: stop once the disc has closed to
    # FIT_WALL_FRACTION of its initial wall gap; drop the leading transient.
    d1s, d2s = wall_gaps(record, scenario.wall_x)
    min0 = min(d1_0, d2_0)
    end = len(rows) - 1  # exclude the terminal placeholder row
    for i in range(len(rows)):
        if min(d1s[i], d2s[i]) <= FIT_WALL_FRACTION * min0:
            end = i
            break
    start = int(math.ceil(FIT_TRANSIENT_FRACTION * end))
    if end - start >= 2:
        ts = np.array(record.times[start:end])
        logs = np.log(np.array(r[start:end]))
        fitted = float(np.polyfit(ts, logs, 1)[0])
    else:
        fitted = math.nan

    # Chattering statistics over the non-terminal rows.
    i_hx = COLUMNS.index("hP_x")
    near_tol = 2.0 * scenario.nu * scenario.dt
    flips = 0
    near_steps = 0
    near_flips = 0
    prev_sign = 0
    for i in range(len(rows) - 1):
        hx = rows[i][i_hx]
        near = abs(d1s[i] - d2s[i]) <= near_tol
        if near:
            near_steps += 1
        s = _sign(hx)
        if s != 0 and prev_sign != 0 and s != prev_sign:
            flips += 1
            if near:
                near_flips += 1
        if s != 0:
            prev_sign = s
    max_angle = max_heading_step_angle(record)

    return DivergenceReport(
        r_series=r,
        fitted_rate=fitted,
        predicted_rate=predicted_divergence_rate(scenario.nu) if scenario.nu > 0 else math.nan,
        flip_count=flips,
        near_surface_steps=near_steps,
        near_surface_flips=near_flips,
        max_heading_step_angle=max_angle,
        outcome=outcome,
        record=record,
        monitors=monitor_suite(record),
        fit_window=(start, end),
    )
