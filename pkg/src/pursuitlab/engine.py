"""Fixed-step simulation engine and runtime invariant monitors.

Integration scheme
------------------
Explicit Euler with simultaneous play: both velocities are evaluated on the
pre-step state, then x <- x + v * dt for both agents.  Simple motion with
bounded speeds keeps the global error O(dt), and the monitor tolerances absorb
the discretization.  Time is kept as step_index * dt (no accumulation drift),
and the whole loop is deterministic: identical configs, initial conditions,
strategies and seeds produce bit-identical trajectories.

Capture is declared at ||r|| <= capture_tol at a step boundary.  The
continuous-time game ends at exact coincidence; a tolerance is mandatory in
discrete time, so the tolerance used is reported in the outcome.  Target
reach is checked before capture within a step: ties go to the evader.

Monitors
--------
When the guaranteed pursuer is active, every provable property of the law is
checked as the run unfolds (worst margins are reported per monitor):

  M1 containment:   d_min(t) > -containment_tol            (disc stays caged)
  M2 V-monotone:    V(t+dt) >= V(t) - v_monotone_tol       (certificate grows)
  M3 z_P nonzero:   ||z_P(t)|| > 0                         (law well-defined)
  M4 distance:      ||r(t)|| < ||r(t0)|| + distance_tol    (never farther)
  M5 envelope:      V(t) >= envelope(t) * (1 - slack)      (exponential floor)
  M6 capture bound: t_f <= 2 (1 + 1/nu) R_C ln(R_C/delta)
  M7 capture locus: ||x_f - x_C|| <= R_C + containment_tol

M2 checks transitions of the game in progress: the one transition that lands
inside the capture ball is excluded, because there the separation collapses
below the step displacement and the second-order tolerance rationale (bounded
curvature of V along a frozen-velocity step) no longer applies.

For other pursuers only the law-independent distance monitor M4 is evaluated
(the others state claims of the guaranteed law); its recorded failures are the
point of the naive-law experiments.  Monitor failures never stop a run; they
are reported.  Strategy errors (singular policy, decided geometry) do stop
the run, as a monitor-violation outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import DomainError, PursuitError
from .geometry import (
    Disc,
    Vec2,
    apollonius_disc,
    capture_disc,
    capture_margin,
    capture_time_bound,
    check_speed_ratio,
    lyapunov_envelope,
)
from .strategies import (
    GameState,
    GuaranteedPursuer,
    evader_velocity,
    guaranteed_direction,
    make_state,
)

__all__ = [
    "SimConfig",
    "Captured",
    "EvaderReachedTarget",
    "HorizonExceeded",
    "MonitorViolation",
    "Outcome",
    "TrajectoryRecord",
    "MonitorResult",
    "MonitorReport",
    "RunResult",
    "Simulation",
    "step",
    "run",
    "monitor_suite",
    "delta1_excess",
    "CaptureExcess",
    "sensing_check",
    "max_heading_step_angle",
    "MultiPursuer",
    "MultiPursuitResult",
    "run_multi",
    "COLUMNS",
]

COLUMNS = (
    "t", "xP", "yP", "xE", "yE", "xA", "yA", "R_A",
    "y_x", "y_y", "d_min", "d_max", "V", "znorm",
    "hP_x", "hP_y", "vE_x", "vE_y",
)

ENVELOPE_SLACK_DEFAULT = 0.05
CONTAINMENT_TOL_DEFAULT = 1e-6
DISTANCE_TOL_DEFAULT = 1e-6


@dataclass(slots=True, frozen=True)
class SimConfig:
    """Simulation parameters. Unset tolerances resolve to scale-aware defaults.

    scale = max(||r(t0)||, 1); capture_tol and target_tol default to
    1e-3 * scale, v_monotone_tol to 1e-6 + 4 (1 + nu)^2 dt^2 per step.
    `nu` is the speed ratio the pursuit geometry uses; `evader_speed` (default
    nu) caps the actual evader speed and may be set lower for robustness runs.
    """

    dt: float
    t_max: float
    nu: float
    delta: float
    capture_tol: Optional[float] = None
    evader_speed: Optional[float] = None
    v_monotone_tol: Optional[float] = None
    containment_tol: float = CONTAINMENT_TOL_DEFAULT
    distance_tol: float = DISTANCE_TOL_DEFAULT
    envelope_slack: float = ENVELOPE_SLACK_DEFAULT
    target_tol: Optional[float] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not self.t_max > 0:
            raise DomainError(f"t_max must be positive, got {self.t_max}")
        check_speed_ratio(self.nu)
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if self.capture_tol is not None and not self.capture_tol > 0:
            raise DomainError(f"capture_tol must be positive, got {self.capture_tol}")
        if self.evader_speed is not None:
            check_speed_ratio(self.evader_speed)


@dataclass(slots=True, frozen=True)
class Captured:
    t_f: float
    x_f: Vec2
    capture_tol: float
    kind = "captured"


@dataclass(slots=True, frozen=True)
class EvaderReachedTarget:
    t: float
    x: Vec2
    kind = "evader_reached_target"


@dataclass(slots=True, frozen=True)
class HorizonExceeded:
    t: float
    kind = "horizon_exceeded"


@dataclass(slots=True, frozen=True)
class MonitorViolation:
    name: str
    t: float
    detail: str = ""
    kind = "monitor_violation"


Outcome = Union[Captured, EvaderReachedTarget, HorizonExceeded, MonitorViolation]


@dataclass(slots=True)
class TrajectoryRecord:
    """Per-step log of a run plus the metadata monitors need.

    Each row is an 18-tuple in COLUMNS order.  The terminal row carries zero
    heading/velocity placeholders (no step is taken from it).  Rows advance
    strictly by dt; the final row is flagged by `outcome`.
    """

    rows: list
    outcome: Optional[Outcome]
    nu: float
    evader_speed: float
    delta: float
    cap: Disc
    dt: float
    capture_tol: float
    law_active: bool
    v_monotone_tol: float
    containment_tol: float
    distance_tol: float
    envelope_slack: float

    def column(self, name: str) -> list:
        i = COLUMNS.index(name)
        return [row[i] for row in self.rows]

    def r_norms(self) -> list:
        return [math.hypot(row[3] - row[1], row[4] - row[2]) for row in self.rows]

    @property
    def times(self) -> list:
        return [row[0] for row in self.rows]


@dataclass(slots=True)
class MonitorResult:
    name: str
    passed: bool
    worst_margin: float
    t_worst: float

    def as_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name} {status} margin={self.worst_margin:.6g} t_worst={self.t_worst:.6g}"


@dataclass(slots=True)
class MonitorReport:
    """Results of every enabled monitor, one entry each."""

    results: list

    def __iter__(self):
        return iter(self.results)

    def by_name(self, name: str) -> MonitorResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_text(self) -> str:
        return "\n".join(r.as_line() for r in self.results)


@dataclass(slots=True)
class RunResult:
    record: TrajectoryRecord
    report: MonitorReport
    outcome: Outcome


class Simulation:
    """Incremental fixed-step simulation: one owner, stepped to termination.

    Shared by `run` (batch) and the arena session (interactive), so both
    advance through identical arithmetic.
    """

    def __init__(self, config: SimConfig, x_P0: Vec2, x_E0: Vec2, pursuer, evader,
                 targets=None):
        self.config = config
        self.pursuer = pursuer
        self.evader = evader
        self.targets = targets

        r0 = x_E0.distance_to(x_P0)
        scale = max(r0, 1.0)
        self.capture_tol = config.capture_tol if config.capture_tol is not None else 1e-3 * scale
        self.target_tol = config.target_tol if config.target_tol is not None else 1e-3 * scale
        self.evader_speed = config.evader_speed if config.evader_speed is not None else config.nu
        self.v_monotone_tol = (
            config.v_monotone_tol
            if config.v_monotone_tol is not None
            else 1e-6 + 4.0 * (1.0 + config.nu) ** 2 * config.dt ** 2
        )
        if r0 <= self.capture_tol:
            raise DomainError(
                f"initial separation {r0:.6g} is not above the capture tolerance "
                f"{self.capture_tol:.6g}"
            )

        ac0 = apollonius_disc(x_P0, x_E0, config.nu)
        delta = getattr(pursuer, "delta", None)
        self.delta = float(delta) if delta is not None else config.delta
        self.cap = capture_disc(ac0, self.delta)
        self.law_active = isinstance(pursuer, GuaranteedPursuer)

        self.n = 0
        self.n_max = int(math.floor(config.t_max / config.dt + 1e-9))
        self.x_P = x_P0
        self.x_E = x_E0
        self.rows: list = []
        self.outcome: Optional[Outcome] = None

    @property
    def t(self) -> float:
        return self.n * self.config.dt

    @property
    def finished(self) -> bool:
        return self.outcome is not None

    def state(self) -> GameState:
        return make_state(self.t, self.x_P, self.x_E, self.config.nu, self.cap)

    def _append_row(self, state: GameState, znorm: float, heading: Vec2, v_E: Vec2):
        off = state.off
        self.rows.append((
            state.t, state.x_P.x, state.x_P.y, state.x_E.x, state.x_E.y,
            state.ac.center.x, state.ac.center.y, state.ac.radius,
            off.y.x, off.y.y, off.d_min, off.d_max, off.V, znorm,
            heading.x, heading.y, v_E.x, v_E.y,
        ))

    def _znorm(self, state: GameState) -> float:
        # r_hat is taken as zero at exact coincidence so the terminal row
        # stays finite; only the terminal row can hit this.
        rnorm = state.r.norm()
        rc_ra = state.cap.radius - state.ac.radius
        y = state.off.y
        if rnorm == 0.0:
            return state.nu * y.norm()
        k = rc_ra / rnorm
        return math.hypot(k * state.r.x + state.nu * y.x, k * state.r.y + state.nu * y.y)

    def advance(self) -> bool:
        """Evaluate and record the current state, then take one Euler step.

        Returns False once the run has terminated (the terminal state is
        recorded with zero heading/velocity placeholders).
        """
        if self.outcome is not None:
            return False
        state = self.state()
        zero = Vec2(0.0, 0.0)

        # Terminal checks on the current state; target reach is checked first
        # because ties go to the evader.
        rnorm = state.r.norm()
        if self.targets is not None and self.targets.distance(state.x_E) <= self.target_tol:
            self.outcome = EvaderReachedTarget(t=state.t, x=state.x_E)
        elif rnorm <= self.capture_tol:
            self.outcome = Captured(t_f=state.t, x_f=state.x_E, capture_tol=self.capture_tol)
        elif self.n >= self.n_max:
            self.outcome = HorizonExceeded(t=state.t)
        if self.outcome is not None:
            self._append_row(state, self._znorm(state), zero, zero)
            return False

        try:
            heading = self.pursuer.direction(state)
            v_E = evader_velocity(self.evader, state, self.evader_speed)
        except PursuitError as exc:
            self.outcome = MonitorViolation(name=type(exc).__name__, t=state.t, detail=str(exc))
            self._append_row(state, self._znorm(state), zero, zero)
            return False

        self._append_row(state, self._znorm(state), heading, v_E)
        dt = self.config.dt
        self.x_P = Vec2(self.x_P.x + heading.x * dt, self.x_P.y + heading.y * dt)
        self.x_E = Vec2(self.x_E.x + v_E.x * dt, self.x_E.y + v_E.y * dt)
        self.n += 1
        return True

    def run_to_end(self) -> Outcome:
        while self.advance():
            pass
        return self.outcome

    def record(self) -> TrajectoryRecord:
        return TrajectoryRecord(
            rows=self.rows,
            outcome=self.outcome,
            nu=self.config.nu,
            evader_speed=self.evader_speed,
            delta=self.delta,
            cap=self.cap,
            dt=self.config.dt,
            capture_tol=self.capture_tol,
            law_active=self.law_active,
            v_monotone_tol=self.v_monotone_tol,
            containment_tol=self.config.containment_tol,
            distance_tol=self.config.distance_tol,
            envelope_slack=self.config.envelope_slack,
        )


def step(state: GameState, pursuer, evader, dt: float,
         evader_speed: Optional[float] = None) -> GameState:
    """One explicit-Euler step with both velocities evaluated on `state`.

    Strategy errors propagate as exceptions here; `run` converts them into
    terminal outcomes instead.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    heading = pursuer.direction(state)
    v_E = evader_velocity(evader, state, evader_speed if evader_speed is not None else state.nu)
    x_P = Vec2(state.x_P.x + heading.x * dt, state.x_P.y + heading.y * dt)
    x_E = Vec2(state.x_E.x + v_E.x * dt, state.x_E.y + v_E.y * dt)
    return make_state(state.t + dt, x_P, x_E, state.nu, state.cap)


def run(config: SimConfig, x_P0: Vec2, x_E0: Vec2, pursuer, evader,
        targets=None) -> RunResult:
    """Simulate to termination and evaluate the monitor suite."""
    sim = Simulation(config, x_P0, x_E0, pursuer, evader, targets)
    outcome = sim.run_to_end()
    record = sim.record()
    return RunResult(record=record, report=monitor_suite(record), outcome=outcome)


def _monitor(name: str, margins, times, strict: bool) -> MonitorResult:
    worst = math.inf
    t_worst = times[0] if times else 0.0
    for m, t in zip(margins, times):
        if m < worst:
            worst = m
            t_worst = t
    if not margins:
        return MonitorResult(name, True, math.inf, 0.0)
    passed = worst > 0.0 if strict else worst >= 0.0
    return MonitorResult(name, passed, worst, t_worst)


def monitor_suite(record: TrajectoryRecord) -> MonitorReport:
    """Evaluate the runtime monitors over a completed (or partial) record.

    Pure function of the record; callable on records loaded back from CSV as
    long as the metadata fields are populated.
    """
    rows = record.rows
    times = [row[0] for row in rows]
    results = []

    # M4 is meaningful for any pursuer; the rest check guaranteed-law claims.
    r = record.r_norms()
    if rows:
        r0 = r[0]
        m4 = _monitor(
            "M4_distance",
            [r0 + record.distance_tol - ri for ri in r[1:]],
            times[1:],
            strict=True,
        )
    else:
        m4 = MonitorResult("M4_distance", True, math.inf, 0.0)

    if not record.law_active:
        return MonitorReport(results=[m4])

    d_min = record.column("d_min")
    V = record.column("V")
    znorm = record.column("znorm")
    R_C = record.cap.radius

    results.append(_monitor(
        "M1_containment",
        [d + record.containment_tol for d in d_min],
        times,
        strict=True,
    ))
    # The transition into a captured terminal row crosses the capture ball,
    # where the separation shrinks by an order of magnitude within one step
    # and the frozen-velocity Euler step under-resolves the line-of-sight
    # rotation (V's curvature along the step grows like 1/r).  The monotone
    # claim with second-order slack applies to the game in progress.
    n_pairs = len(V) - 1
    if isinstance(record.outcome, Captured) and n_pairs > 0:
        n_pairs -= 1
    results.append(_monitor(
        "M2_v_monotone",
        [V[i + 1] - V[i] + record.v_monotone_tol for i in range(n_pairs)],
        times[1:1 + n_pairs],
        strict=False,
    ))
    results.append(_monitor("M3_z_nonzero", znorm, times, strict=True))
    results.append(m4)

    if rows:
        V0 = V[0]
        t0 = times[0]
        factor = 1.0 - record.envelope_slack
        env_margins = [
            V[i] - factor * lyapunov_envelope(V0, record.nu, R_C, times[i] - t0)
            for i in range(1, len(V))
        ]
        results.append(_monitor("M5_envelope", env_margins, times[1:], strict=False))
    else:
        results.append(MonitorResult("M5_envelope", True, math.inf, 0.0))

    if isinstance(record.outcome, Captured):
        t0 = times[0] if rows else 0.0
        bound = capture_time_bound(record.nu, R_C, record.delta)
        elapsed = record.outcome.t_f - t0
        results.append(MonitorResult(
            "M6_capture_time", elapsed <= bound,
            bound - elapsed if math.isfinite(bound) else math.inf,
            record.outcome.t_f,
        ))
        dist_c = record.outcome.x_f.distance_to(record.cap.center)
        margin = R_C + record.containment_tol - dist_c
        results.append(MonitorResult("M7_capture_in_cap", margin >= 0.0, margin, record.outcome.t_f))
    else:
        results.append(MonitorResult("M6_capture_time", True, math.inf, 0.0))
        results.append(MonitorResult("M7_capture_in_cap", True, math.inf, 0.0))

    order = {"M1": 0, "M2": 1, "M3": 2, "M4": 3, "M5": 4, "M6": 5, "M7": 6}
    results.sort(key=lambda res: order[res.name[:2]])
    return MonitorReport(results=results)


@dataclass(slots=True)
class CaptureExcess:
    """How far beyond the initial dominance disc the capture landed.

    `excess` is max(0, ||x_f - x_C|| - R_A(t0)).  `d_min_final` is
    R_C - ||x_f - x_C||, to compare against the tightened neighborhood width
    `delta1` = R_C - sqrt(R_C^2 - delta^2); both are reported because the
    guarantee bounds d_min_final >= delta1 while the excess itself is bounded
    by delta.
    """

    excess: float
    d_min_final: float
    delta1: float


def delta1_excess(record: TrajectoryRecord) -> CaptureExcess:
    if not isinstance(record.outcome, Captured):
        raise DomainError("delta1_excess requires a captured outcome")
    R_C = record.cap.radius
    R_A0 = record.rows[0][COLUMNS.index("R_A")]
    dist_c = record.outcome.x_f.distance_to(record.cap.center)
    return CaptureExcess(
        excess=max(0.0, dist_c - R_A0),
        d_min_final=R_C - dist_c,
        delta1=capture_margin(R_C, record.delta),
    )


def sensing_check(record: TrajectoryRecord, rho: float) -> bool:
    """True iff the agents stayed within sensing distance rho for the whole run."""
    return all(ri <= rho for ri in record.r_norms())


def max_heading_step_angle(record: TrajectoryRecord) -> float:
    """Largest angle between consecutive pursuer headings over the run.

    Divided by dt this is the run's measured heading-rate constant: bounded
    for the continuous guaranteed law, of order the full chatter angle for
    the naive two-wall law.  The terminal placeholder row is ignored.
    """
    ix, iy = COLUMNS.index("hP_x"), COLUMNS.index("hP_y")
    worst = 0.0
    rows = record.rows
    for i in range(len(rows) - 2):
        ax, ay = rows[i][ix], rows[i][iy]
        bx, by = rows[i + 1][ix], rows[i + 1][iy]
        dot = max(-1.0, min(1.0, ax * bx + ay * by))
        worst = max(worst, math.acos(dot))
    return worst


# ---------------------------------------------------------------------------
# Multi-pursuer runs
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class MultiPursuer:
    """One pursuer of a decentralized team: own start, own speed-ratio model,
    own capture-disc inflation.  No communication with teammates."""

    x_P0: Vec2
    nu: float
    delta: float


@dataclass(slots=True)
class MultiPursuitResult:
    outcome: Outcome
    caps: list
    capturer: Optional[int]
    positions_P: list
    position_E: Vec2


def run_multi(pursuers: Sequence[MultiPursuer], x_E0: Vec2, evader,
              evader_speed: float, dt: float, t_max: float,
              capture_tol: float = 1e-3, targets=None) -> MultiPursuitResult:
    """Simulate several independent guaranteed-law pursuers against one evader.

    Each pursuer builds its own capture disc from its own speed-ratio model
    and steers by its own state only.  The run ends at the first capture by
    any pursuer (or target reach / horizon).  The evader strategy is evaluated
    against a state built w.r.t. the first pursuer; the shipped evader
    strategies only read their own position and the time from it.
    """
    check_speed_ratio(evader_speed)
    caps = []
    for p in pursuers:
        check_speed_ratio(p.nu)
        if evader_speed > p.nu:
            raise DomainError(
                f"evader speed {evader_speed} exceeds pursuer model nu={p.nu}; "
                "the per-pursuer guarantee needs evader_speed <= nu"
            )
        caps.append(capture_disc(apollonius_disc(p.x_P0, x_E0, p.nu), p.delta))

    positions = [p.x_P0 for p in pursuers]
    x_E = x_E0
    n_max = int(math.floor(t_max / dt + 1e-9))
    outcome: Optional[Outcome] = None
    capturer = None

    for n in range(n_max + 1):
        t = n * dt
        if targets is not None and targets.distance(x_E) <= capture_tol:
            outcome = EvaderReachedTarget(t=t, x=x_E)
            break
        for i, x_P in enumerate(positions):
            if x_E.distance_to(x_P) <= capture_tol:
                outcome = Captured(t_f=t, x_f=x_E, capture_tol=capture_tol)
                capturer = i
                break
        if outcome is not None or n == n_max:
            if outcome is None:
                outcome = HorizonExceeded(t=t)
            break

        states = [
            make_state(t, positions[i], x_E, pursuers[i].nu, caps[i])
            for i in range(len(pursuers))
        ]
        headings = [guaranteed_direction(s) for s in states]
        v_E = evader_velocity(evader, states[0], evader_speed)
        positions = [
            Vec2(positions[i].x + headings[i].x * dt, positions[i].y + headings[i].y * dt)
            for i in range(len(pursuers))
        ]
        x_E = Vec2(x_E.x + v_E.x * dt, x_E.y + v_E.y * dt)

    return MultiPursuitResult(
        outcome=outcome, caps=caps, capturer=capturer,
        positions_P=positions, position_E=x_E,
    )
