"""Pursuer and evader control laws as pure state -> velocity maps.

The pursuer laws return a unit heading (pursuer speed is always 1); evader
strategies return a velocity with norm at most the evader speed cap.  The
guaranteed law steers along z_P = (R_C - R_A) * r_hat + nu * y, which blends
closing on the evader with re-centering the drifting dominance disc inside the
fixed capture disc; it is continuous in the state, which is precisely what the
naive bang-bang law of the two-wall problem lacks.

Only `DeadzonePursuer` (commitment window) and `ExternalEvader` (live control
stream) carry mutable state; each simulation must own its strategy instances
exclusively.  Everything else is safely shareable.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import DegenerateStateError, DomainError, GeometryError, SingularPolicyError
from .geometry import (
    Disc,
    Offsets,
    Vec2,
    apollonius_disc,
    check_speed_ratio,
    offsets,
)

__all__ = [
    "GameState",
    "make_state",
    "z_pursuer",
    "z_evader",
    "guaranteed_direction",
    "pure_pursuit_direction",
    "lateral_aim_points",
    "bang_bang_direction",
    "deadzone_direction",
    "evader_velocity",
    "scaled_velocity",
    "GuaranteedPursuer",
    "PurePursuitPursuer",
    "BangBangPursuer",
    "DeadzonePursuer",
    "ToPointEvader",
    "ConstantHeadingEvader",
    "RadialEscapeEvader",
    "ScriptedEvader",
    "ExternalEvader",
]

# Scripted segment boundaries are half-open; a step time within this of a
# boundary counts as already belonging to the next segment, so replayed
# control logs pick the same segment despite float summation order.
SEGMENT_BOUNDARY_EPS = 1e-9

# Default dispersal-surface tie tolerance, scaled by wall half-gap (exact
# d1 == d2 is measure zero in floating point; the mixed strategy needs a
# trigger window).
TIE_TOL_FACTOR = 1e-12


@dataclass(slots=True)
class GameState:
    """Instantaneous game state plus derived disc quantities.

    Derived fields (r, ac, off) are always computed by `make_state` from the
    primary fields and are never stored stale.  `nu` is the speed ratio the
    pursuit geometry is built with (the pursuer's model of the evader); the
    engine may cap the actual evader speed below it.
    """

    t: float
    x_P: Vec2
    x_E: Vec2
    nu: float
    cap: Disc
    r: Vec2
    ac: Disc
    off: Offsets


def make_state(t: float, x_P: Vec2, x_E: Vec2, nu: float, cap: Disc) -> GameState:
    """Build a GameState, recomputing all derived quantities."""
    ac = apollonius_disc(x_P, x_E, nu)
    return GameState(
        t=t,
        x_P=x_P,
        x_E=x_E,
        nu=nu,
        cap=cap,
        r=x_E - x_P,
        ac=ac,
        off=offsets(ac, cap),
    )


def z_pursuer(state: GameState) -> Vec2:
    """Steering vector (R_C - R_A) * r_hat + nu * y of the guaranteed law."""
    rnorm = state.r.norm()
    if rnorm == 0.0:
        raise DegenerateStateError("agents coincide; r_hat is undefined")
    k = (state.cap.radius - state.ac.radius) / rnorm
    y = state.off.y
    return Vec2(k * state.r.x + state.nu * y.x, k * state.r.y + state.nu * y.y)


def z_evader(state: GameState) -> Vec2:
    """Worst-case evader direction nu * (R_C - R_A) * r_hat + y.

    Used by the monitors (the certificate-derivative identity) rather than by
    any shipped evader strategy.
    """
    rnorm = state.r.norm()
    if rnorm == 0.0:
        raise DegenerateStateError("agents coincide; r_hat is undefined")
    k = state.nu * (state.cap.radius - state.ac.radius) / rnorm
    y = state.off.y
    return Vec2(k * state.r.x + y.x, k * state.r.y + y.y)


def guaranteed_direction(state: GameState) -> Vec2:
    """Unit heading of the guaranteed pursuit law (full speed 1 is always used).

    Raises SingularPolicyError if the steering vector vanishes.  Along any
    trajectory started with the capture disc construction this cannot happen
    (the engine monitors it), but arbitrary hand-built states can reach it.
    """
    z = z_pursuer(state)
    n = z.norm()
    if n == 0.0:
        raise SingularPolicyError("steering vector z_P is zero; heading undefined")
    return Vec2(z.x / n, z.y / n)


def pure_pursuit_direction(state: GameState) -> Vec2:
    """Head straight at the evader's current position."""
    rnorm = state.r.norm()
    if rnorm == 0.0:
        raise DegenerateStateError("agents coincide; pure pursuit undefined")
    return Vec2(state.r.x / rnorm, state.r.y / rnorm)


def lateral_aim_points(ac: Disc, wall_x: float) -> tuple[Vec2, Vec2, float, float]:
    """Extreme lateral points of the disc and their gaps to the walls x = +-wall_x.

    Returns (I1, I2, d1, d2) where I1/I2 are the leftmost/rightmost disc
    points and d1/d2 the horizontal distances from them to the left/right
    wall.  Negative d means the disc pokes through that wall.
    """
    i1 = Vec2(ac.center.x - ac.radius, ac.center.y)
    i2 = Vec2(ac.center.x + ac.radius, ac.center.y)
    d1 = i1.x - (-wall_x)
    d2 = wall_x - i2.x
    return i1, i2, d1, d2


def bang_bang_direction(
    state: GameState,
    wall_x: float,
    tie_break: str = "seeded_coin",
    rng: random.Random | None = None,
    tie_tol: float | None = None,
) -> Vec2:
    """Naive two-wall guarding law: head to the disc edge nearest a wall.

    Aims at I1 when d1 < d2 and at I2 when d1 > d2.  Within `tie_tol` of the
    dispersal surface d1 == d2 the choice follows `tie_break`: "always_left",
    "always_right", or "seeded_coin" (a 50/50 draw from `rng`).  Raises
    GeometryError once the disc touches a wall: the guarding game is then
    decided and the law is undefined.
    """
    if tie_tol is None:
        tie_tol = TIE_TOL_FACTOR * max(1.0, wall_x)
    i1, i2, d1, d2 = lateral_aim_points(state.ac, wall_x)
    if d1 <= 0.0 or d2 <= 0.0:
        raise GeometryError(
            f"dominance disc already touches a wall (d1={d1:.6g}, d2={d2:.6g})"
        )
    if abs(d1 - d2) <= tie_tol:
        if tie_break == "always_left":
            aim = i1
        elif tie_break == "always_right":
            aim = i2
        elif tie_break == "seeded_coin":
            if rng is None:
                raise DomainError("tie_break='seeded_coin' requires an rng")
            aim = i1 if rng.random() < 0.5 else i2
        else:
            raise DomainError(f"unknown tie_break {tie_break!r}")
    else:
        aim = i1 if d1 < d2 else i2
    return (aim - state.x_P).normalized()


def deadzone_direction(
    state: GameState,
    inner: "BangBangPursuer",
    commit_time: float,
    trigger_width: float,
    committed_until: float,
) -> tuple[Vec2, float]:
    """Bang-bang law with a pure-pursuit commitment near the dispersal surface.

    While committed (state.t < committed_until) head straight at the evader.
    Otherwise, if the state is within `trigger_width` of the surface
    |d1 - d2| = 0, start a new commitment of length `commit_time` and head at
    the evader; else defer to the inner bang-bang law.  Returns the heading
    and the updated commitment expiry.
    """
    if state.t < committed_until:
        return pure_pursuit_direction(state), committed_until
    _, _, d1, d2 = lateral_aim_points(state.ac, inner.wall_x)
    if d1 <= 0.0 or d2 <= 0.0:
        raise GeometryError(
            f"dominance disc already touches a wall (d1={d1:.6g}, d2={d2:.6g})"
        )
    if abs(d1 - d2) <= trigger_width:
        return pure_pursuit_direction(state), state.t + commit_time
    return inner.direction(state), committed_until


def scaled_velocity(heading: Vec2, fraction: float, speed: float) -> Vec2:
    """Velocity from a unit (or zero) heading and a speed fraction.

    Shared by scripted evaders, the external control stream, and the arena
    session so that a replayed control log reproduces identical floats.
    """
    s = fraction * speed
    return Vec2(heading.x * s, heading.y * s)


# ---------------------------------------------------------------------------
# Pursuer strategies
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class GuaranteedPursuer:
    """The capture-guaranteed law. `delta` is the capture-disc inflation."""

    delta: float

    def __post_init__(self):
        if not (isinstance(self.delta, (int, float)) and math.isfinite(self.delta) and self.delta > 0):
            raise DomainError(f"delta must be positive, got {self.delta!r}")

    def direction(self, state: GameState) -> Vec2:
        return guaranteed_direction(state)


@dataclass(slots=True)
class PurePursuitPursuer:
    """Max speed straight at the evader (no capture-location guarantee)."""

    def direction(self, state: GameState) -> Vec2:
        return pure_pursuit_direction(state)


@dataclass(slots=True)
class BangBangPursuer:
    """Two-wall guarding law with a tie-break rule on the dispersal surface."""

    wall_x: float
    tie_break: str = "seeded_coin"
    ims_seed: int = 0
    tie_tol: float | None = None
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        if self.wall_x <= 0:
            raise DomainError(f"wall_x must be positive, got {self.wall_x}")
        if self.tie_break not in ("always_left", "always_right", "seeded_coin"):
            raise DomainError(f"unknown tie_break {self.tie_break!r}")
        self._rng = random.Random(self.ims_seed)

    def direction(self, state: GameState) -> Vec2:
        return bang_bang_direction(
            state, self.wall_x, self.tie_break, self._rng, self.tie_tol
        )


@dataclass(slots=True)
class DeadzonePursuer:
    """Bang-bang law wrapped with a pure-pursuit commitment of length T.

    `trigger_width` is the dispersal-surface proximity that starts a
    commitment.  Carries the commitment expiry as mutable state; do not share
    one instance across simulations.
    """

    inner: BangBangPursuer
    commit_time: float
    trigger_width: float
    committed_until: float = field(default=-math.inf)

    def __post_init__(self):
        if self.commit_time <= 0:
            raise DomainError(f"commit_time must be positive, got {self.commit_time}")
        if self.trigger_width <= 0:
            raise DomainError(f"trigger_width must be positive, got {self.trigger_width}")

    def direction(self, state: GameState) -> Vec2:
        heading, self.committed_until = deadzone_direction(
            state, self.inner, self.commit_time, self.trigger_width, self.committed_until
        )
        return heading


# ---------------------------------------------------------------------------
# Evader strategies
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class ToPointEvader:
    """Run at full speed to a fixed point; optionally stop on arrival.

    With the point inside the initial dominance disc this realizes the
    evader's side of the near-equilibrium pair: reach the point, wait for
    capture there.
    """

    target: Vec2
    stop_on_arrival: bool = True
    arrival_tol: float = 1e-3

    def velocity(self, state: GameState, speed: float) -> Vec2:
        d = self.target - state.x_E
        dist = d.norm()
        if dist == 0.0 or (self.stop_on_arrival and dist <= self.arrival_tol):
            return Vec2(0.0, 0.0)
        return Vec2(d.x / dist * speed, d.y / dist * speed)


@dataclass(slots=True)
class ConstantHeadingEvader:
    """Full speed along a fixed heading (normalized at construction)."""

    heading: Vec2

    def __post_init__(self):
        self.heading = self.heading.normalized()

    def velocity(self, state: GameState, speed: float) -> Vec2:
        return Vec2(self.heading.x * speed, self.heading.y * speed)


@dataclass(slots=True)
class RadialEscapeEvader:
    """Full speed directly away from a fixed point (e.g. the pursuer's start)."""

    origin: Vec2

    def velocity(self, state: GameState, speed: float) -> Vec2:
        d = state.x_E - self.origin
        dist = d.norm()
        if dist == 0.0:
            return Vec2(0.0, 0.0)
        return Vec2(d.x / dist * speed, d.y / dist * speed)


class ScriptedEvader:
    """Piecewise-constant control script: segments of (duration, heading, fraction).

    Headings are normalized at construction (a zero heading means a stationary
    segment); fractions must lie in [0, 1].  Segment lookup is half-open in
    time with a small boundary epsilon so step times landing exactly on a
    boundary deterministically take the next segment.  After the script ends
    the evader holds still.
    """

    __slots__ = ("segments", "_bounds")

    def __init__(self, segments):
        cleaned = []
        for i, (duration, heading, fraction) in enumerate(segments):
            if not (isinstance(duration, (int, float)) and duration > 0):
                raise DomainError(f"segment {i}: duration must be positive, got {duration!r}")
            if not (0.0 <= fraction <= 1.0):
                raise DomainError(f"segment {i}: speed fraction must be in [0, 1], got {fraction!r}")
            if not isinstance(heading, Vec2):
                heading = Vec2(heading[0], heading[1])
            if heading.norm() > 0.0:
                heading = heading.normalized()
            else:
                heading = Vec2(0.0, 0.0)
            cleaned.append((float(duration), heading, float(fraction)))
        self.segments = cleaned
        bounds = []
        acc = 0.0
        for duration, _, _ in cleaned:
            acc += duration
            bounds.append(acc)
        self._bounds = bounds

    def velocity(self, state: GameState, speed: float) -> Vec2:
        t = state.t
        for end, (_, heading, fraction) in zip(self._bounds, self.segments):
            if t < end - SEGMENT_BOUNDARY_EPS:
                return scaled_velocity(heading, fraction, speed)
        return Vec2(0.0, 0.0)


class ExternalEvader:
    """Evader driven by an external control stream (e.g. an arena client).

    Holds the last commanded (heading, fraction) for up to `hold_window` of
    simulation time after the last post, then zeroes the velocity until a new
    command arrives.  Commands are clamped on the way in: heading normalized
    (zero heading means stationary), fraction clipped to [0, 1].
    """

    __slots__ = ("hold_window", "heading", "fraction", "last_post_t")

    def __init__(self, hold_window: float = 0.25):
        self.hold_window = hold_window
        self.heading = Vec2(0.0, 0.0)
        self.fraction = 0.0
        self.last_post_t = -math.inf

    def post(self, heading: Vec2, fraction: float, t: float) -> None:
        if heading.norm() > 0.0:
            self.heading = heading.normalized()
            self.fraction = min(1.0, max(0.0, float(fraction)))
        else:
            self.heading = Vec2(0.0, 0.0)
            self.fraction = 0.0
        self.last_post_t = t

    def velocity(self, state: GameState, speed: float) -> Vec2:
        if state.t - self.last_post_t > self.hold_window:
            return Vec2(0.0, 0.0)
        return scaled_velocity(self.heading, self.fraction, speed)


def evader_velocity(strategy, state: GameState, speed: float | None = None) -> Vec2:
    """Evaluate an evader strategy, enforcing the admissible speed cap.

    `speed` defaults to the state's speed ratio; pass a smaller value for
    runs where the true evader is slower than the pursuer's model of it.
    """
    if speed is None:
        speed = state.nu
    else:
        speed = check_speed_ratio(speed)
    v = strategy.velocity(state, speed)
    n = v.norm()
    if n > speed and n > 0.0:
        v = Vec2(v.x / n * speed, v.y / n * speed)
    return v
