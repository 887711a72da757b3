"""Scenario files, trajectory CSV emission, and their round-trips.

Scenario grammar (YAML, one mapping per file)
---------------------------------------------
::

    pursuer_start: [0.0, 0.0]        # or pursuer_starts: [[..], [..], ...]
    evader_start: [0.0, 1.0]
    nu: 0.5                          # speed ratio the pursuit geometry uses
    evader_speed: 0.4                # optional true evader cap (default nu)
    delta: 0.1                       # or "auto": 0.5 * gap to targets
    dt: 0.001                        # optional, default 1e-3
    t_max: 60.0                      # optional, default 60
    capture_tol: 0.001               # optional, default 1e-3 * scale
    seed: 7                          # required by stochastic strategies
    pursuer:
      kind: guaranteed               # pure_pursuit | bang_bang | deadzone
      # bang_bang / deadzone extras: wall_x, tie_break,
      #                              commit_time, trigger_width
    evader:
      kind: to_point                 # constant_heading | radial_escape |
      target: [0.0, 2.0]             # scripted | external
      stop_on_arrival: true
    targets:                         # optional
      - {kind: point, at: [0.0, 3.0]}
      - {kind: segment, a: [..], b: [..]}
      - {kind: disc, center: [..], radius: ..}
      - {kind: polyline, points: [[..], ...]}
      - {kind: vertical_line, x: .., y_range: [lo, hi]}   # y_range optional
    field:                           # optional
      kind: distance                 # linear (a, b) | radial (center)

Unknown keys anywhere are errors (no silent typos); every constraint of the
engine and strategy types is re-checked at load, and all problems are
reported together with their key paths.

Scenarios are unitless; the tolerance scale convention is
max(||r(t0)||, 1).

Trajectory CSV
--------------
Fixed 18-column header ``t,xP,yP,xE,yE,xA,yA,R_A,y_x,y_y,d_min,d_max,V,
znorm,hP_x,hP_y,vE_x,vE_y``; one row per step, numbers with 12 significant
digits, locale-independent; final comment line
``# outcome=<kind> t_f=<..> x_f=<..,..>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import yaml

from .errors import ScenarioError
from .engine import COLUMNS, SimConfig, TrajectoryRecord
from .games import (
    DiscTarget,
    DistanceField,
    LinearField,
    PointTarget,
    PolylineTarget,
    RadialField,
    SegmentTarget,
    TargetSet,
    VerticalLineTarget,
    guarding_verdict,
)
from .geometry import Disc, Vec2
from .strategies import (
    BangBangPursuer,
    ConstantHeadingEvader,
    DeadzonePursuer,
    ExternalEvader,
    GuaranteedPursuer,
    PurePursuitPursuer,
    RadialEscapeEvader,
    ScriptedEvader,
    ToPointEvader,
)

__all__ = [
    "Scenario",
    "parse_scenario",
    "serialize_scenario",
    "load_scenario",
    "write_trajectory",
    "read_trajectory",
    "ParsedTrajectory",
]

PURSUER_KINDS = ("guaranteed", "pure_pursuit", "bang_bang", "deadzone")
EVADER_KINDS = ("to_point", "constant_heading", "radial_escape", "scripted", "external")
TARGET_KINDS = ("point", "segment", "disc", "polyline", "vertical_line")
FIELD_KINDS = ("distance", "linear", "radial")

TOP_KEYS = {
    "pursuer_start", "pursuer_starts", "evader_start", "nu", "evader_speed",
    "delta", "dt", "t_max", "capture_tol", "seed", "pursuer", "evader",
    "targets", "field",
}


@dataclass
class Scenario:
    """Validated scenario: normalized spec dicts plus resolved numbers.

    Strategy and target specs are kept as plain dicts so a scenario can be
    serialized back out unchanged; `build_*` construct fresh objects per run
    (stateful strategies must not be shared between runs).
    """

    x_P: Vec2
    x_E: Vec2
    nu: float
    delta: float
    dt: float
    t_max: float
    pursuer_spec: dict
    evader_spec: dict
    evader_speed: Optional[float] = None
    capture_tol: Optional[float] = None
    seed: Optional[int] = None
    target_specs: Optional[list] = None
    field_spec: Optional[dict] = None
    pursuer_starts: Optional[list] = None  # multi-pursuer alternative

    # -- construction of runnable objects ----------------------------------

    def config(self) -> SimConfig:
        return SimConfig(
            dt=self.dt, t_max=self.t_max, nu=self.nu, delta=self.delta,
            capture_tol=self.capture_tol, evader_speed=self.evader_speed,
        )

    def build_pursuer(self):
        spec = self.pursuer_spec
        kind = spec["kind"]
        if kind == "guaranteed":
            return GuaranteedPursuer(delta=self.delta)
        if kind == "pure_pursuit":
            return PurePursuitPursuer()
        if kind == "bang_bang":
            return BangBangPursuer(
                wall_x=spec["wall_x"],
                tie_break=spec.get("tie_break", "seeded_coin"),
                ims_seed=self.seed if self.seed is not None else 0,
            )
        if kind == "deadzone":
            inner = BangBangPursuer(
                wall_x=spec["wall_x"],
                tie_break=spec.get("tie_break", "seeded_coin"),
                ims_seed=self.seed if self.seed is not None else 0,
            )
            return DeadzonePursuer(
                inner=inner,
                commit_time=spec["commit_time"],
                trigger_width=spec["trigger_width"],
            )
        raise ScenarioError(f"pursuer.kind: unknown kind {kind!r}")

    def build_evader(self):
        spec = self.evader_spec
        kind = spec["kind"]
        if kind == "to_point":
            return ToPointEvader(
                target=_vec(spec["target"]),
                stop_on_arrival=spec.get("stop_on_arrival", True),
            )
        if kind == "constant_heading":
            return ConstantHeadingEvader(heading=_vec(spec["heading"]))
        if kind == "radial_escape":
            origin = spec.get("origin")
            return RadialEscapeEvader(origin=_vec(origin) if origin is not None else self.x_P)
        if kind == "scripted":
            return ScriptedEvader([
                (seg["duration"], _vec(seg["heading"]), seg["speed_fraction"])
                for seg in spec["segments"]
            ])
        if kind == "external":
            return ExternalEvader(hold_window=spec.get("hold_window", 0.25))
        raise ScenarioError(f"evader.kind: unknown kind {kind!r}")

    def build_targets(self) -> Optional[TargetSet]:
        if not self.target_specs:
            return None
        prims = []
        for spec in self.target_specs:
            kind = spec["kind"]
            if kind == "point":
                prims.append(PointTarget(at=_vec(spec["at"])))
            elif kind == "segment":
                prims.append(SegmentTarget(a=_vec(spec["a"]), b=_vec(spec["b"])))
            elif kind == "disc":
                prims.append(DiscTarget(Disc(center=_vec(spec["center"]), radius=spec["radius"])))
            elif kind == "polyline":
                prims.append(PolylineTarget(points=[_vec(p) for p in spec["points"]]))
            elif kind == "vertical_line":
                y_range = spec.get("y_range")
                prims.append(VerticalLineTarget(
                    at_x=spec["x"],
                    y_range=tuple(y_range) if y_range is not None else None,
                ))
        return TargetSet(prims)

    def build_field(self):
        if self.field_spec is None:
            return None
        kind = self.field_spec["kind"]
        if kind == "distance":
            return DistanceField(self.build_targets())
        if kind == "linear":
            return LinearField(a=_vec(self.field_spec["a"]), b=self.field_spec.get("b", 0.0))
        if kind == "radial":
            return RadialField(center=_vec(self.field_spec["center"]))
        raise ScenarioError(f"field.kind: unknown kind {kind!r}")


def _vec(pair) -> Vec2:
    return Vec2(float(pair[0]), float(pair[1]))


# ---------------------------------------------------------------------------
# Parsing / validation
# ---------------------------------------------------------------------------


class _Check:
    """Collects located problems so a load reports everything at once."""

    def __init__(self):
        self.problems: list = []

    def fail(self, path: str, msg: str):
        self.problems.append(f"{path}: {msg}")

    def point(self, data, path: str, required: bool = True):
        if data is None:
            if required:
                self.fail(path, "missing required point [x, y]")
            return None
        if (not isinstance(data, (list, tuple)) or len(data) != 2
                or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in data)):
            self.fail(path, f"expected [x, y] with finite numbers, got {data!r}")
            return None
        return [float(data[0]), float(data[1])]

    def number(self, data, path: str, lo=None, hi=None, lo_open=False, hi_open=False,
               required: bool = True, default=None):
        if data is None:
            if required:
                self.fail(path, "missing required number")
            return default
        if not isinstance(data, (int, float)) or isinstance(data, bool) or not math.isfinite(data):
            self.fail(path, f"expected a finite number, got {data!r}")
            return default
        v = float(data)
        if lo is not None and (v <= lo if lo_open else v < lo):
            self.fail(path, f"must be {'>' if lo_open else '>='} {lo}, got {v}")
            return default
        if hi is not None and (v >= hi if hi_open else v > hi):
            self.fail(path, f"must be {'<' if hi_open else '<='} {hi}, got {v}")
            return default
        return v

    def mapping(self, data, path: str, allowed: set):
        if not isinstance(data, dict):
            self.fail(path, f"expected a mapping, got {type(data).__name__}")
            return None
        for key in data:
            if key not in allowed:
                self.fail(f"{path}.{key}" if path else str(key), "unknown key")
        return data


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario document.

    Raises ScenarioError carrying every located problem (syntax errors with
    line/column, semantic errors with key paths).
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioError(f"syntax error{loc}: {getattr(exc, 'problem', exc)}") from exc

    chk = _Check()
    chk.mapping(data, "", TOP_KEYS)
    if not isinstance(data, dict):
        raise ScenarioError(chk.problems)

    p_start = chk.point(data.get("pursuer_start"), "pursuer_start",
                        required="pursuer_starts" not in data)
    p_starts = None
    if "pursuer_starts" in data:
        if "pursuer_start" in data:
            chk.fail("pursuer_starts", "give either pursuer_start or pursuer_starts, not both")
        raw = data["pursuer_starts"]
        if not isinstance(raw, list) or not raw:
            chk.fail("pursuer_starts", "expected a non-empty list of [x, y] points")
        else:
            p_starts = [chk.point(p, f"pursuer_starts[{i}]") for i, p in enumerate(raw)]
    e_start = chk.point(data.get("evader_start"), "evader_start")
    nu = chk.number(data.get("nu"), "nu", lo=0.0, hi=1.0, hi_open=True)
    evader_speed = chk.number(data.get("evader_speed"), "evader_speed",
                              lo=0.0, hi=1.0, hi_open=True, required=False)
    dt = chk.number(data.get("dt"), "dt", lo=0.0, lo_open=True, required=False, default=1e-3)
    t_max = chk.number(data.get("t_max"), "t_max", lo=0.0, lo_open=True, required=False, default=60.0)
    capture_tol = chk.number(data.get("capture_tol"), "capture_tol",
                             lo=0.0, lo_open=True, required=False)
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        chk.fail("seed", f"expected an integer, got {seed!r}")
        seed = None

    # targets first; "auto" delta needs them
    target_specs = _parse_targets(data.get("targets"), chk)
    field_spec = _parse_field(data.get("field"), chk, have_targets=bool(target_specs))
    pursuer_spec = _parse_pursuer(data.get("pursuer"), chk, seed)
    evader_spec = _parse_evader(data.get("evader"), chk)

    delta_raw = data.get("delta")
    delta = None
    if delta_raw == "auto":
        if not target_specs:
            chk.fail("delta", '"auto" requires a non-empty targets list')
        elif not chk.problems and p_start is not None and e_start is not None and nu is not None:
            scenario_tmp = Scenario(
                x_P=_vec(p_start), x_E=_vec(e_start), nu=nu, delta=1.0, dt=dt, t_max=t_max,
                pursuer_spec={"kind": "guaranteed"}, evader_spec={"kind": "constant_heading", "heading": [0, 1]},
                target_specs=target_specs,
            )
            verdict = guarding_verdict(scenario_tmp.x_P, scenario_tmp.x_E, nu, scenario_tmp.build_targets())
            if verdict.kind_winner == "evader":
                chk.fail("delta", '"auto" undefined: the initial dominance disc touches the target set')
            else:
                delta = verdict.delta_selected
    else:
        delta = chk.number(delta_raw, "delta", lo=0.0, lo_open=True)

    if chk.problems:
        raise ScenarioError(chk.problems)

    return Scenario(
        x_P=_vec(p_start) if p_start else _vec(p_starts[0]),
        x_E=_vec(e_start),
        nu=nu,
        delta=delta,
        dt=dt,
        t_max=t_max,
        pursuer_spec=pursuer_spec,
        evader_spec=evader_spec,
        evader_speed=evader_speed,
        capture_tol=capture_tol,
        seed=seed,
        target_specs=target_specs,
        field_spec=field_spec,
        pursuer_starts=p_starts,
    )


def _parse_pursuer(data, chk: _Check, seed) -> dict:
    if data is None:
        chk.fail("pursuer", "missing required strategy mapping")
        return {"kind": "guaranteed"}
    allowed = {"kind", "wall_x", "tie_break", "commit_time", "trigger_width"}
    if chk.mapping(data, "pursuer", allowed) is None:
        return {"kind": "guaranteed"}
    kind = data.get("kind")
    if kind not in PURSUER_KINDS:
        chk.fail("pursuer.kind", f"expected one of {PURSUER_KINDS}, got {kind!r}")
        return {"kind": "guaranteed"}
    spec = {"kind": kind}
    if kind in ("bang_bang", "deadzone"):
        wall_x = chk.number(data.get("wall_x"), "pursuer.wall_x", lo=0.0, lo_open=True)
        spec["wall_x"] = wall_x
        tie = data.get("tie_break", "seeded_coin")
        if tie not in ("always_left", "always_right", "seeded_coin"):
            chk.fail("pursuer.tie_break", f"unknown tie_break {tie!r}")
        else:
            spec["tie_break"] = tie
            if tie == "seeded_coin" and seed is None:
                chk.fail("seed", "required: pursuer tie_break 'seeded_coin' is stochastic")
    else:
        for key in ("wall_x", "tie_break"):
            if key in data:
                chk.fail(f"pursuer.{key}", f"not valid for kind {kind!r}")
    if kind == "deadzone":
        spec["commit_time"] = chk.number(data.get("commit_time"), "pursuer.commit_time",
                                         lo=0.0, lo_open=True)
        spec["trigger_width"] = chk.number(data.get("trigger_width"), "pursuer.trigger_width",
                                           lo=0.0, lo_open=True)
    else:
        for key in ("commit_time", "trigger_width"):
            if key in data:
                chk.fail(f"pursuer.{key}", f"not valid for kind {kind!r}")
    return spec


def _parse_evader(data, chk: _Check) -> dict:
    if data is None:
        chk.fail("evader", "missing required strategy mapping")
        return {"kind": "constant_heading", "heading": [0, 1]}
    allowed = {"kind", "target", "stop_on_arrival", "heading", "origin", "segments", "hold_window"}
    if chk.mapping(data, "evader", allowed) is None:
        return {"kind": "constant_heading", "heading": [0, 1]}
    kind = data.get("kind")
    if kind not in EVADER_KINDS:
        chk.fail("evader.kind", f"expected one of {EVADER_KINDS}, got {kind!r}")
        return {"kind": "constant_heading", "heading": [0, 1]}
    spec = {"kind": kind}
    if kind == "to_point":
        target = chk.point(data.get("target"), "evader.target")
        if target:
            spec["target"] = target
        if "stop_on_arrival" in data:
            if not isinstance(data["stop_on_arrival"], bool):
                chk.fail("evader.stop_on_arrival", "expected true/false")
            else:
                spec["stop_on_arrival"] = data["stop_on_arrival"]
    elif kind == "constant_heading":
        heading = chk.point(data.get("heading"), "evader.heading")
        if heading:
            if heading[0] == 0.0 and heading[1] == 0.0:
                chk.fail("evader.heading", "must be nonzero")
            else:
                spec["heading"] = heading
    elif kind == "radial_escape":
        origin = chk.point(data.get("origin"), "evader.origin", required=False)
        if origin:
            spec["origin"] = origin
    elif kind == "scripted":
        segments = data.get("segments")
        if not isinstance(segments, list) or not segments:
            chk.fail("evader.segments", "expected a non-empty list of segments")
        else:
            cleaned = []
            for i, seg in enumerate(segments):
                path = f"evader.segments[{i}]"
                if chk.mapping(seg, path, {"duration", "heading", "speed_fraction"}) is None:
                    continue
                duration = chk.number(seg.get("duration"), f"{path}.duration", lo=0.0, lo_open=True)
                heading = chk.point(seg.get("heading"), f"{path}.heading")
                fraction = chk.number(seg.get("speed_fraction"), f"{path}.speed_fraction",
                                      lo=0.0, hi=1.0)
                if duration is not None and heading is not None and fraction is not None:
                    cleaned.append({"duration": duration, "heading": heading,
                                    "speed_fraction": fraction})
            spec["segments"] = cleaned
    elif kind == "external":
        hold = chk.number(data.get("hold_window"), "evader.hold_window",
                          lo=0.0, required=False)
        if hold is not None:
            spec["hold_window"] = hold
    return spec


def _parse_targets(data, chk: _Check):
    if data is None:
        return None
    if not isinstance(data, list) or not data:
        chk.fail("targets", "expected a non-empty list of target primitives")
        return None
    specs = []
    for i, prim in enumerate(data):
        path = f"targets[{i}]"
        allowed = {"kind", "at", "a", "b", "center", "radius", "points", "x", "y_range"}
        if chk.mapping(prim, path, allowed) is None:
            continue
        kind = prim.get("kind")
        if kind not in TARGET_KINDS:
            chk.fail(f"{path}.kind", f"expected one of {TARGET_KINDS}, got {kind!r}")
            continue
        spec = {"kind": kind}
        if kind == "point":
            at = chk.point(prim.get("at"), f"{path}.at")
            if at:
                spec["at"] = at
        elif kind == "segment":
            a = chk.point(prim.get("a"), f"{path}.a")
            b = chk.point(prim.get("b"), f"{path}.b")
            if a and b:
                spec["a"], spec["b"] = a, b
        elif kind == "disc":
            center = chk.point(prim.get("center"), f"{path}.center")
            radius = chk.number(prim.get("radius"), f"{path}.radius", lo=0.0)
            if center is not None and radius is not None:
                spec["center"], spec["radius"] = center, radius
        elif kind == "polyline":
            pts = prim.get("points")
            if not isinstance(pts, list) or len(pts) < 2:
                chk.fail(f"{path}.points", "expected a list of at least two points")
            else:
                spec["points"] = [chk.point(p, f"{path}.points[{j}]") for j, p in enumerate(pts)]
        elif kind == "vertical_line":
            x = chk.number(prim.get("x"), f"{path}.x")
            if x is not None:
                spec["x"] = x
            y_range = prim.get("y_range")
            if y_range is not None:
                pair = chk.point(y_range, f"{path}.y_range")
                if pair and pair[0] > pair[1]:
                    chk.fail(f"{path}.y_range", "lower bound exceeds upper bound")
                elif pair:
                    spec["y_range"] = pair
        specs.append(spec)
    return specs


def _parse_field(data, chk: _Check, have_targets: bool):
    if data is None:
        return None
    allowed = {"kind", "a", "b", "center"}
    if chk.mapping(data, "field", allowed) is None:
        return None
    kind = data.get("kind")
    if kind not in FIELD_KINDS:
        chk.fail("field.kind", f"expected one of {FIELD_KINDS}, got {kind!r}")
        return None
    spec = {"kind": kind}
    if kind == "distance":
        if not have_targets:
            chk.fail("field", "distance field requires a targets list")
    elif kind == "linear":
        a = chk.point(data.get("a"), "field.a")
        if a:
            spec["a"] = a
        b = chk.number(data.get("b"), "field.b", required=False, default=0.0)
        spec["b"] = b
    elif kind == "radial":
        center = chk.point(data.get("center"), "field.center")
        if center:
            spec["center"] = center
    return spec


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical YAML for a validated scenario; parse(serialize(s)) == s."""
    doc: dict = {}
    if scenario.pursuer_starts is not None:
        doc["pursuer_starts"] = [list(p) for p in scenario.pursuer_starts]
    else:
        doc["pursuer_start"] = [scenario.x_P.x, scenario.x_P.y]
    doc["evader_start"] = [scenario.x_E.x, scenario.x_E.y]
    doc["nu"] = scenario.nu
    if scenario.evader_speed is not None:
        doc["evader_speed"] = scenario.evader_speed
    doc["delta"] = scenario.delta
    doc["dt"] = scenario.dt
    doc["t_max"] = scenario.t_max
    if scenario.capture_tol is not None:
        doc["capture_tol"] = scenario.capture_tol
    if scenario.seed is not None:
        doc["seed"] = scenario.seed
    doc["pursuer"] = dict(scenario.pursuer_spec)
    doc["evader"] = dict(scenario.evader_spec)
    if scenario.target_specs:
        doc["targets"] = [dict(s) for s in scenario.target_specs]
    if scenario.field_spec:
        doc["field"] = dict(scenario.field_spec)
    return yaml.safe_dump(doc, sort_keys=False)


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------------------
# Trajectory CSV
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".12g")


def write_trajectory(record: TrajectoryRecord) -> str:
    """Emit the fixed 18-column CSV plus the trailing outcome comment line."""
    lines = [",".join(COLUMNS)]
    for row in record.rows:
        lines.append(",".join(_fmt(v) for v in row))
    outcome = record.outcome
    if outcome is not None:
        t_f = getattr(outcome, "t_f", getattr(outcome, "t", math.nan))
        if record.rows:
            x_f = getattr(outcome, "x_f", getattr(outcome, "x", None))
            if x_f is None:
                last = record.rows[-1]
                xf_txt = f"{_fmt(last[3])},{_fmt(last[4])}"
            else:
                xf_txt = f"{_fmt(x_f.x)},{_fmt(x_f.y)}"
        else:
            xf_txt = "nan,nan"
        extra = f" name={outcome.name}" if hasattr(outcome, "name") else ""
        lines.append(f"# outcome={outcome.kind} t_f={_fmt(t_f)} x_f={xf_txt}{extra}")
    return "\n".join(lines) + "\n"


@dataclass
class ParsedTrajectory:
    rows: list
    outcome_kind: Optional[str] = None
    t_f: Optional[float] = None
    x_f: Optional[tuple] = None
    extras: dict = dc_field(default_factory=dict)

    def column(self, name: str) -> list:
        i = COLUMNS.index(name)
        return [row[i] for row in self.rows]


def read_trajectory(text: str) -> ParsedTrajectory:
    """Parse CSV produced by write_trajectory back into rows and outcome."""
    out = ParsedTrajectory(rows=[])
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return out
    header = lines[0].split(",")
    if tuple(header) != COLUMNS:
        raise ScenarioError(f"unexpected CSV header {header!r}")
    for ln in lines[1:]:
        if ln.startswith("#"):
            parts = ln[1:].split()
            for part in parts:
                key, _, value = part.partition("=")
                if key == "outcome":
                    out.outcome_kind = value
                elif key == "t_f":
                    out.t_f = float(value)
                elif key == "x_f":
                    xs = value.split(",")
                    out.x_f = (float(xs[0]), float(xs[1]))
                else:
                    out.extras[key] = value
            continue
        out.rows.append(tuple(float(v) for v in ln.split(",")))
    return out
