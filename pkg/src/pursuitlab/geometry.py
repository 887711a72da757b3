"""Static dominance-region geometry.

Everything here is a pure function of positions and the speed ratio `nu`
(evader max speed / pursuer max speed, with the pursuer normalized to speed 1):
the evader's dominance disc, the fixed capture disc built by inflating it, the
offset quantities between the two, and the certificate function V whose growth
underwrites the capture guarantee.  All values are immutable; every function is
safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "Vec2",
    "ApolloniusCoefficients",
    "Disc",
    "Offsets",
    "check_speed_ratio",
    "coefficients",
    "apollonius_disc",
    "capture_disc",
    "offsets",
    "lyapunov_envelope",
    "capture_time_bound",
    "capture_margin",
]


@dataclass(slots=True)
class Vec2:
    """Planar point / displacement / velocity. Treat instances as immutable."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def norm_sq(self) -> float:
        return self.x * self.x + self.y * self.y

    def distance_to(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def normalized(self) -> "Vec2":
        n = math.hypot(self.x, self.y)
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return Vec2(self.x / n, self.y / n)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(slots=True)
class ApolloniusCoefficients:
    """The dimensionless triple (alpha, beta, gamma) for a given speed ratio.

    alpha = 1/(1 - nu^2), gamma = nu * alpha, beta = nu * gamma, so
    alpha >= gamma >= beta >= 0 for nu in [0, 1).
    """

    alpha: float
    beta: float
    gamma: float


@dataclass(slots=True)
class Disc:
    """Closed disc: all points within `radius` of `center`."""

    center: Vec2
    radius: float

    def contains(self, p: Vec2, tol: float = 0.0) -> bool:
        return p.distance_to(self.center) <= self.radius + tol


@dataclass(slots=True)
class Offsets:
    """Relative placement of a moving disc inside a fixed one.

    y is the center offset, d_min/d_max the min/max gap between the moving
    disc and the fixed boundary, and V = d_min * d_max the certificate value
    (negative once the moving disc has escaped).
    """

    y: Vec2
    d_min: float
    d_max: float
    V: float


def check_speed_ratio(nu: float, upper: float = 1.0) -> float:
    """Validate 0 <= nu < upper (upper defaults to 1) and return nu."""
    if not isinstance(nu, (int, float)) or not math.isfinite(nu):
        raise DomainError(f"speed ratio must be a finite number, got {nu!r}")
    if nu < 0.0 or nu >= upper:
        raise DomainError(f"speed ratio must satisfy 0 <= nu < {upper}, got {nu}")
    return float(nu)


def _check_finite(name: str, v: Vec2) -> Vec2:
    if not v.is_finite():
        raise DomainError(f"{name} must have finite components, got ({v.x}, {v.y})")
    return v


def coefficients(nu: float) -> ApolloniusCoefficients:
    """Coefficients of the dominance-disc construction for speed ratio nu."""
    nu = check_speed_ratio(nu)
    alpha = 1.0 / (1.0 - nu * nu)
    gamma = nu * alpha
    beta = nu * gamma
    return ApolloniusCoefficients(alpha=alpha, beta=beta, gamma=gamma)


def apollonius_disc(x_P: Vec2, x_E: Vec2, nu: float) -> Disc:
    """Evader dominance disc for pursuer at x_P, evader at x_E, speed ratio nu.

    Center alpha*x_E - beta*x_P, radius gamma*|x_E - x_P|.  Every boundary
    point b satisfies |b - x_E| = nu * |b - x_P|: the set of points the evader
    reaches no later than the pursuer.  Degenerates to the point {x_E} when
    nu = 0 or the agents coincide.
    """
    _check_finite("x_P", x_P)
    _check_finite("x_E", x_E)
    c = coefficients(nu)
    center = Vec2(c.alpha * x_E.x - c.beta * x_P.x, c.alpha * x_E.y - c.beta * x_P.y)
    radius = c.gamma * x_E.distance_to(x_P)
    return Disc(center=center, radius=radius)


def capture_disc(initial_ac: Disc, delta: float) -> Disc:
    """Fixed disc obtained by inflating the initial dominance disc by delta > 0."""
    if not (isinstance(delta, (int, float)) and math.isfinite(delta) and delta > 0.0):
        raise DomainError(f"delta must be a finite positive number, got {delta!r}")
    return Disc(center=initial_ac.center, radius=initial_ac.radius + float(delta))


def offsets(ac: Disc, cap: Disc) -> Offsets:
    """Offset quantities of the current disc `ac` relative to the fixed `cap`.

    V may be negative when `ac` has left `cap`; that state is representable
    (it is exactly what the containment monitor flags).
    """
    y = ac.center - cap.center
    y_norm = y.norm()
    d_min = cap.radius - (ac.radius + y_norm)
    d_max = cap.radius - (ac.radius - y_norm)
    return Offsets(y=y, d_min=d_min, d_max=d_max, V=d_min * d_max)


def lyapunov_envelope(V0: float, nu: float, R_C: float, t: float) -> float:
    """Guaranteed lower bound V0 * exp(nu * t / ((1 + nu) * R_C)) on V at time t.

    V0 and R_C must be positive, t nonnegative.  Under the guaranteed law the
    certificate value can only sit above this curve.
    """
    nu = check_speed_ratio(nu)
    if not V0 > 0.0:
        raise DomainError(f"V0 must be positive, got {V0}")
    if not R_C > 0.0:
        raise DomainError(f"R_C must be positive, got {R_C}")
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t}")
    return V0 * math.exp(nu * t / ((1.0 + nu) * R_C))


def capture_time_bound(nu: float, R_C: float, delta: float) -> float:
    """Worst-case capture time 2*(1 + 1/nu)*R_C*ln(R_C/delta) after the start.

    This is the time at which the envelope started at V0 = delta^2 reaches
    R_C^2, which forces capture.  Returns +inf for nu = 0 (the bound is
    vacuous for a stationary evader; capture still occurs).
    """
    nu = check_speed_ratio(nu)
    if nu == 0.0:
        return math.inf
    return 2.0 * (1.0 + 1.0 / nu) * R_C * math.log(R_C / delta)


def capture_margin(R_C: float, delta: float) -> float:
    """The tightened capture-neighborhood width R_C - sqrt(R_C^2 - delta^2).

    Lower bound on d_min at capture implied by V never dropping below delta^2;
    always smaller than delta.
    """
    if not 0.0 < delta <= R_C:
        raise DomainError(f"need 0 < delta <= R_C, got delta={delta}, R_C={R_C}")
    return R_C - math.sqrt(R_C * R_C - delta * delta)
