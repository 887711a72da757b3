"""Target sets, value fields, and the who-wins / how-much layer.

A guarding game is decided entirely by static geometry at the start: the
evader wins iff the initial dominance disc already touches the target set,
and otherwise the pursuer wins by inflating the disc by half the gap.  For
payoff fields, the game value is the minimum of the field over the initial
disc; this module computes that minimum in closed form for the shipped field
kinds and by polar sampling for arbitrary callables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .errors import DomainError
from .geometry import Disc, Vec2, apollonius_disc, check_speed_ratio, coefficients

__all__ = [
    "PointTarget",
    "SegmentTarget",
    "DiscTarget",
    "PolylineTarget",
    "VerticalLineTarget",
    "TargetSet",
    "DistanceField",
    "LinearField",
    "RadialField",
    "ValueField",
    "GameVerdict",
    "phi_eval",
    "phi_star",
    "guarding_verdict",
    "critical_speed",
    "delta_for_margin",
    "multi_pursuer_membership",
    "final_location_value",
]

# Absolute tolerance for "the disc touches the target" decisions on
# unit-scale scenarios; boundary contact must count as touching because ties
# go to the evader.
TOUCH_TOL = 1e-9


@dataclass(slots=True)
class PointTarget:
    at: Vec2

    def nearest_point(self, p: Vec2) -> Vec2:
        return self.at

    def distance(self, p: Vec2) -> float:
        return p.distance_to(self.at)


@dataclass(slots=True)
class SegmentTarget:
    a: Vec2
    b: Vec2

    def nearest_point(self, p: Vec2) -> Vec2:
        v = self.b - self.a
        vv = v.norm_sq()
        if vv == 0.0:
            return self.a
        s = (p - self.a).dot(v) / vv
        s = min(1.0, max(0.0, s))
        return Vec2(self.a.x + s * v.x, self.a.y + s * v.y)

    def distance(self, p: Vec2) -> float:
        return p.distance_to(self.nearest_point(p))


@dataclass(slots=True)
class DiscTarget:
    """A solid disc target: distance is zero anywhere inside."""

    disc: Disc

    def nearest_point(self, p: Vec2) -> Vec2:
        d = p.distance_to(self.disc.center)
        if d <= self.disc.radius:
            return p
        u = (p - self.disc.center) * (self.disc.radius / d)
        return self.disc.center + u

    def distance(self, p: Vec2) -> float:
        return max(0.0, p.distance_to(self.disc.center) - self.disc.radius)


@dataclass(slots=True)
class PolylineTarget:
    points: Sequence[Vec2]

    def __post_init__(self):
        if len(self.points) < 2:
            raise DomainError("polyline target needs at least two points")

    def _segments(self):
        for a, b in zip(self.points, self.points[1:]):
            yield SegmentTarget(a, b)

    def nearest_point(self, p: Vec2) -> Vec2:
        best, best_d = None, math.inf
        for seg in self._segments():
            q = seg.nearest_point(p)
            d = p.distance_to(q)
            if d < best_d:
                best, best_d = q, d
        return best

    def distance(self, p: Vec2) -> float:
        return min(seg.distance(p) for seg in self._segments())


@dataclass(slots=True)
class VerticalLineTarget:
    """Vertical line x = at_x, optionally restricted to a y interval."""

    at_x: float
    y_range: Optional[tuple] = None

    def nearest_point(self, p: Vec2) -> Vec2:
        y = p.y
        if self.y_range is not None:
            y = min(max(y, self.y_range[0]), self.y_range[1])
        return Vec2(self.at_x, y)

    def distance(self, p: Vec2) -> float:
        return p.distance_to(self.nearest_point(p))


TargetPrimitive = Union[PointTarget, SegmentTarget, DiscTarget, PolylineTarget, VerticalLineTarget]


@dataclass(slots=True)
class TargetSet:
    """Non-empty collection of fixed target primitives."""

    primitives: Sequence[TargetPrimitive]

    def __post_init__(self):
        if not self.primitives:
            raise DomainError("target set must be non-empty")

    def distance(self, p: Vec2) -> float:
        return min(prim.distance(p) for prim in self.primitives)

    def nearest_point(self, p: Vec2) -> Vec2:
        best, best_d = None, math.inf
        for prim in self.primitives:
            q = prim.nearest_point(p)
            d = p.distance_to(q)
            if d < best_d:
                best, best_d = q, d
        return best


@dataclass(slots=True)
class DistanceField:
    """phi(x) = distance from x to the target set (1-Lipschitz, >= 0)."""

    targets: TargetSet

    def __call__(self, x: Vec2) -> float:
        return self.targets.distance(x)


@dataclass(slots=True)
class LinearField:
    """phi(x) = a . x + b."""

    a: Vec2
    b: float = 0.0

    def __call__(self, x: Vec2) -> float:
        return self.a.x * x.x + self.a.y * x.y + self.b


@dataclass(slots=True)
class RadialField:
    """phi(x) = ||x - center||."""

    center: Vec2

    def __call__(self, x: Vec2) -> float:
        return x.distance_to(self.center)


ValueField = Union[DistanceField, LinearField, RadialField, Callable[[Vec2], float]]


def phi_eval(field: ValueField, x: Vec2) -> float:
    """Evaluate a value field at a point."""
    return field(x)


def _angle_around(c: Vec2, p: Vec2) -> float:
    return math.atan2(p.y - c.y, p.x - c.x)


def _phi_star_distance(field: DistanceField, ac: Disc):
    # Distance fields are radially monotone away from the target, so the
    # disc-to-set distance max(0, dist(center, prim) - R) is exact per
    # primitive and the set value is the min over primitives.
    best = math.inf
    candidates = []
    for prim in field.targets.primitives:
        q = prim.nearest_point(ac.center)
        d = ac.center.distance_to(q)
        val = max(0.0, d - ac.radius)
        if val <= 0.0:
            minimizer = q  # the nearest target point already lies in the disc
        elif d > 0.0:
            u = (q - ac.center) * (ac.radius / d)
            minimizer = ac.center + u
        else:
            minimizer = ac.center
        candidates.append((val, minimizer))
        best = min(best, val)
    tie_tol = TOUCH_TOL * max(1.0, ac.radius)
    winners = [m for val, m in candidates if val <= best + tie_tol]
    winners.sort(key=lambda p: _angle_around(ac.center, p))
    return best, winners[:8]


def _phi_star_sampled(field, ac: Disc, n_angles: int = 128, n_radii: int = 64):
    # Polar grid plus a shrinking local pattern search; approximate, bounded
    # by the grid pitch on 1-Lipschitz fields.
    best_val = field(ac.center)
    best_pt = ac.center
    if ac.radius > 0.0:
        for i in range(n_angles):
            a = 2.0 * math.pi * i / n_angles
            ca, sa = math.cos(a), math.sin(a)
            for j in range(1, n_radii + 1):
                rho = ac.radius * j / n_radii
                p = Vec2(ac.center.x + rho * ca, ac.center.y + rho * sa)
                v = field(p)
                if v < best_val:
                    best_val, best_pt = v, p
        h = ac.radius / n_radii
        while h > 1e-9 * max(1.0, ac.radius):
            improved = False
            for dx, dy in ((h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)):
                p = Vec2(best_pt.x + dx, best_pt.y + dy)
                if p.distance_to(ac.center) > ac.radius:
                    continue
                v = field(p)
                if v < best_val:
                    best_val, best_pt = v, p
                    improved = True
            if not improved:
                h *= 0.5
    return best_val, [best_pt]


def phi_star(field: ValueField, ac: Disc):
    """Minimum of the field over the closed disc, with sample minimizers.

    Closed form for distance, linear and radial fields; polar-grid sampling
    with local refinement for arbitrary callables (approximate).  Returns
    (value, minimizers) with at most 8 minimizers ordered by angle around the
    disc center.
    """
    if isinstance(field, DistanceField):
        return _phi_star_distance(field, ac)
    if isinstance(field, LinearField):
        na = field.a.norm()
        if na == 0.0:
            return field.b, [ac.center]
        u = field.a * (1.0 / na)
        minimizer = Vec2(ac.center.x - ac.radius * u.x, ac.center.y - ac.radius * u.y)
        value = field.a.x * ac.center.x + field.a.y * ac.center.y + field.b - ac.radius * na
        return value, [minimizer]
    if isinstance(field, RadialField):
        d = ac.center.distance_to(field.center)
        if d <= ac.radius:
            return 0.0, [field.center]
        u = (field.center - ac.center) * (ac.radius / d)
        return d - ac.radius, [ac.center + u]
    if callable(field):
        return _phi_star_sampled(field, ac)
    raise DomainError(f"unsupported field {field!r}")


@dataclass(slots=True)
class GameVerdict:
    """Outcome of the static guarding analysis.

    kind_winner is "evader" iff the initial dominance disc touches the target
    set (boundary contact counts: ties go to the evader).  When the pursuer
    wins, delta_selected = half the disc-to-target gap is a capture-disc
    inflation that provably keeps capture off the target set.
    """

    phi_star: float
    x_star_set: list
    kind_winner: str
    delta_selected: Optional[float]
    value: float


def guarding_verdict(x_P: Vec2, x_E: Vec2, nu: float, targets: TargetSet,
                     touch_tol: float = TOUCH_TOL) -> GameVerdict:
    ac0 = apollonius_disc(x_P, x_E, nu)
    value, minimizers = phi_star(DistanceField(targets), ac0)
    evader_wins = value <= touch_tol
    return GameVerdict(
        phi_star=value,
        x_star_set=minimizers,
        kind_winner="evader" if evader_wins else "pursuer",
        delta_selected=None if evader_wins else 0.5 * value,
        value=value,
    )


def critical_speed(x_P: Vec2, x_E: Vec2, targets: TargetSet, tol: float = 1e-8) -> float:
    """Smallest speed ratio at which the initial dominance disc touches the targets.

    Bisection on the monotone touch predicate (discs are nested increasing in
    nu).  Returns 0 if the evader's start already touches; returns the
    sentinel 1 - tol when even nu -> 1 leaves a gap (target unreachable).
    Never returns a value >= 1.
    """
    if not 0 < tol < 1:
        raise DomainError(f"tol must be in (0, 1), got {tol}")
    field = DistanceField(targets)

    def touches(nu: float) -> bool:
        return phi_star(field, apollonius_disc(x_P, x_E, nu))[0] <= 0.0

    if touches(0.0):
        return 0.0
    hi = 1.0 - tol
    if not touches(hi):
        return hi  # sentinel: nu_crit >= 1 - tol
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if touches(mid):
            hi = mid
        else:
            lo = mid
    return hi


def delta_for_margin(nu_crit: float, nu_tilde: float, r0_norm: float) -> float:
    """Capture-disc inflation that backs off the law from nu_crit to nu_tilde.

    Returns (gamma(nu_crit) - gamma(nu_tilde)) * r0 with gamma(nu) =
    nu / (1 - nu^2): exactly the inflation that makes the nu_tilde capture
    disc radius match the nu_crit initial disc radius.  Zero when the two
    ratios coincide.
    """
    check_speed_ratio(nu_crit)
    check_speed_ratio(nu_tilde)
    if nu_tilde > nu_crit:
        raise DomainError(f"need nu_tilde <= nu_crit, got {nu_tilde} > {nu_crit}")
    if r0_norm < 0:
        raise DomainError(f"r0_norm must be nonnegative, got {r0_norm}")
    return (coefficients(nu_crit).gamma - coefficients(nu_tilde).gamma) * r0_norm


def multi_pursuer_membership(x: Vec2, pursuers: Sequence[tuple], x_E: Vec2) -> bool:
    """True iff x lies in every pursuer's initial dominance disc.

    `pursuers` is a sequence of (x_P, nu) pairs.  The intersection region is
    exposed as this membership predicate (sampling-based area or argmax
    queries can be built on top of it).
    """
    for x_P, nu in pursuers:
        if not apollonius_disc(x_P, x_E, nu).contains(x):
            return False
    return True


def sample_intersection(pursuers: Sequence[tuple], x_E: Vec2, rng, n: int = 4096) -> list:
    """Rejection-sample the intersection of all initial dominance discs.

    Draws uniformly inside the smallest disc and keeps points that pass the
    membership test.  The intersection is never empty: the evader's own
    position belongs to every disc.  No exact circle-intersection
    polygonization is attempted.
    """
    discs = [apollonius_disc(x_P, x_E, nu) for x_P, nu in pursuers]
    host = min(discs, key=lambda d: d.radius)
    points = []
    for _ in range(n):
        rho = host.radius * math.sqrt(rng.random())
        ang = rng.uniform(0.0, 2.0 * math.pi)
        p = Vec2(host.center.x + rho * math.cos(ang), host.center.y + rho * math.sin(ang))
        if all(d.contains(p) for d in discs):
            points.append(p)
    return points


def intersection_min_value(pursuers: Sequence[tuple], x_E: Vec2, field: ValueField,
                           rng, n: int = 4096) -> float:
    """Approximate minimum of the field over the disc intersection.

    The minimum (not the maximum) is the quantity consistent with the evader
    minimizing the payoff, mirroring the single-pursuer value; sampling-based
    and therefore approximate.  x_E itself is always a candidate.
    """
    best = phi_eval(field, x_E)
    for p in sample_intersection(pursuers, x_E, rng, n):
        best = min(best, phi_eval(field, p))
    return best


def final_location_value(x_P: Vec2, x_E: Vec2, nu: float, field: ValueField) -> float:
    """Value of the capture-location game: min of the field over the initial disc."""
    return phi_star(field, apollonius_disc(x_P, x_E, nu))[0]
