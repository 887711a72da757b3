"""Live session service: a human (or scripted client) evades over a socket.

Protocol (JSON objects, one per frame) on the ``/arena`` websocket endpoint:

  client -> server   {"type": "control", "heading": [hx, hy], "speed": s}
                     {"type": "start" | "pause" | "reset"}
  server -> client   {"type": "state", "t": .., "pursuer": [..], "evader": [..],
                      "ac": {"c": [..], "r": ..}, "cap": {"c": [..], "r": ..},
                      "d_min": .., "V": .., "znorm": .., "targets": [...],
                      "outcome": null | {"kind": .., ...}}
                     {"type": "error", "msg": ..}

The server owns admissibility: headings are normalized (zero heading means a
stationary evader), speed fractions are clamped to [0, 1], and a control that
stops arriving is held for at most the hold window of simulation time and
then zeroed.  Controls are sampled once per tick (zero-order hold across that
tick's substeps), which makes the applied control sequence exactly
representable as a scripted evader: replaying a session's control log through
the batch engine reproduces the session trajectory float for float.

Each session owns its engine exclusively; message handling per session is
serialized by the event loop.  Frames are broadcast at the tick rate whether
or not the clock is running; a terminal outcome stops the advancement and is
carried by every subsequent frame.  A consumer that cannot drain frames within
the send timeout is disconnected rather than allowed to stall its session.
"""

from __future__ import annotations

import asyncio
import json
import math
import time
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import Simulation
from .geometry import Vec2
from .scenario_io import Scenario, serialize_scenario
from .strategies import scaled_velocity

__all__ = ["Session", "build_app", "outcome_to_json"]

TICK_HZ_DEFAULT = 20.0
SEND_TIMEOUT = 1.0


def outcome_to_json(outcome) -> Optional[dict]:
    if outcome is None:
        return None
    data = {"kind": outcome.kind}
    for attr in ("t_f", "t", "capture_tol", "name", "detail"):
        if hasattr(outcome, attr):
            data[attr] = getattr(outcome, attr)
    for attr in ("x_f", "x"):
        if hasattr(outcome, attr):
            v = getattr(outcome, attr)
            data[attr] = [v.x, v.y]
    return data


class _HeldControlEvader:
    """Evader applying the tick's sampled control to every substep."""

    __slots__ = ("heading", "fraction")

    def __init__(self):
        self.heading = Vec2(0.0, 0.0)
        self.fraction = 0.0

    def velocity(self, state, speed):
        return scaled_velocity(self.heading, self.fraction, speed)


class Session:
    """One controller, one engine, one control log.

    All methods are synchronous and deterministic; the websocket layer only
    schedules them.  `tick()` advances the engine by the session's substep
    count when running and always returns the current state frame.
    """

    def __init__(self, scenario: Scenario, realtime_factor: float = 1.0,
                 tick_hz: float = TICK_HZ_DEFAULT, session_id: Optional[str] = None):
        self.id = session_id if session_id is not None else uuid.uuid4().hex
        self.scenario = scenario
        self.tick_hz = tick_hz
        self.realtime_factor = realtime_factor
        self.substeps = max(1, round(realtime_factor / (tick_hz * scenario.dt)))
        self.hold_window = scenario.evader_spec.get("hold_window", 0.25) \
            if scenario.evader_spec.get("kind") == "external" else 0.25
        self.status = "ready"  # ready | running | paused | done
        self.control_log: list = []
        self._posted_heading = Vec2(0.0, 0.0)
        self._posted_fraction = 0.0
        self._posted_t = -math.inf
        self._held = _HeldControlEvader()
        self._build()

    def _build(self):
        self.sim = Simulation(
            self.scenario.config(),
            self.scenario.x_P,
            self.scenario.x_E,
            self.scenario.build_pursuer(),
            self._held,
            targets=self.scenario.build_targets(),
        )

    # -- protocol ----------------------------------------------------------

    def handle_message(self, msg) -> Optional[dict]:
        """Apply one client message; returns a reply frame or None.

        Malformed messages produce an error frame and leave the last valid
        control in effect.
        """
        if not isinstance(msg, dict) or "type" not in msg:
            return {"type": "error", "msg": "message must be an object with a 'type'"}
        kind = msg["type"]
        if kind == "control":
            try:
                hx, hy = float(msg["heading"][0]), float(msg["heading"][1])
                speed = float(msg["speed"])
            except (KeyError, TypeError, ValueError, IndexError):
                return {"type": "error", "msg": "control needs heading [hx, hy] and speed"}
            if not (math.isfinite(hx) and math.isfinite(hy) and math.isfinite(speed)):
                return {"type": "error", "msg": "control values must be finite"}
            norm = math.hypot(hx, hy)
            if norm > 0.0:
                self._posted_heading = Vec2(hx / norm, hy / norm)
                self._posted_fraction = min(1.0, max(0.0, speed))
            else:
                self._posted_heading = Vec2(0.0, 0.0)
                self._posted_fraction = 0.0
            self._posted_t = self.sim.t
            return None
        if kind == "start":
            if self.status == "done":
                return {"type": "error", "msg": "session finished; reset first"}
            self.status = "running"
            return self.state_frame()
        if kind == "pause":
            if self.status == "running":
                self.status = "paused"
            return self.state_frame()
        if kind == "reset":
            self._build()
            self.status = "ready"
            self.control_log = []
            self._posted_heading = Vec2(0.0, 0.0)
            self._posted_fraction = 0.0
            self._posted_t = -math.inf
            return self.state_frame()
        return {"type": "error", "msg": f"unknown message type {kind!r}"}

    def tick(self) -> dict:
        """Advance one tick when running, then return the state frame."""
        if self.status == "running" and not self.sim.finished:
            if self.sim.t - self._posted_t > self.hold_window:
                heading, fraction = Vec2(0.0, 0.0), 0.0  # control stream dropped out
            else:
                heading, fraction = self._posted_heading, self._posted_fraction
            self._held.heading = heading
            self._held.fraction = fraction
            advanced = 0
            for _ in range(self.substeps):
                if not self.sim.advance():
                    break
                advanced += 1
            if advanced:
                self.control_log.append((advanced, heading.x, heading.y, fraction))
            if self.sim.finished:
                self.status = "done"
        return self.state_frame()

    def state_frame(self) -> dict:
        state = self.sim.state()
        off = state.off
        return {
            "type": "state",
            "t": state.t,
            "pursuer": [state.x_P.x, state.x_P.y],
            "evader": [state.x_E.x, state.x_E.y],
            "ac": {"c": [state.ac.center.x, state.ac.center.y], "r": state.ac.radius},
            "cap": {"c": [state.cap.center.x, state.cap.center.y], "r": state.cap.radius},
            "d_min": off.d_min,
            "V": off.V,
            "znorm": self.sim._znorm(state),
            "targets": [dict(s) for s in (self.scenario.target_specs or [])],
            "outcome": outcome_to_json(self.sim.outcome),
        }

    # -- replay ------------------------------------------------------------

    def control_log_segments(self) -> list:
        """The applied controls as scripted-evader segments (merged runs)."""
        segments = []
        dt = self.scenario.dt
        for substeps, hx, hy, fraction in self.control_log:
            duration = substeps * dt
            if segments and segments[-1][1] == (hx, hy) and segments[-1][2] == fraction:
                segments[-1][0] += duration
            else:
                segments.append([duration, (hx, hy), fraction])
        return [
            {"duration": dur, "heading": [h[0], h[1]], "speed_fraction": frac}
            for dur, h, frac in segments
        ]

    def replay_scenario(self) -> Scenario:
        """The session as a batch scenario: same config, scripted evader."""
        segments = self.control_log_segments()
        if not segments:
            segments = [{"duration": self.scenario.dt, "heading": [0.0, 1.0],
                         "speed_fraction": 0.0}]
        return Scenario(
            x_P=self.scenario.x_P,
            x_E=self.scenario.x_E,
            nu=self.scenario.nu,
            delta=self.scenario.delta,
            dt=self.scenario.dt,
            t_max=self.scenario.t_max,
            pursuer_spec=dict(self.scenario.pursuer_spec),
            evader_spec={"kind": "scripted", "segments": segments},
            evader_speed=self.scenario.evader_speed,
            capture_tol=self.scenario.capture_tol,
            seed=self.scenario.seed,
            target_specs=self.scenario.target_specs,
            field_spec=self.scenario.field_spec,
        )


def build_app(scenario: Scenario, realtime_factor: float = 1.0,
              tick_hz: float = TICK_HZ_DEFAULT, control_log_dir: Optional[str] = None,
              frontend_dir: Optional[str] = None):
    """FastAPI app exposing /arena; each connection gets its own session."""
    app = FastAPI(title="pursuitlab arena")

    @app.websocket("/arena")
    async def arena_endpoint(ws: WebSocket):
        await ws.accept()
        session = Session(scenario, realtime_factor=realtime_factor, tick_hz=tick_hz)
        send_lock = asyncio.Lock()
        closed = asyncio.Event()

        async def send(frame: dict) -> bool:
            try:
                async with send_lock:
                    await asyncio.wait_for(ws.send_text(json.dumps(frame)), SEND_TIMEOUT)
                return True
            except Exception:
                closed.set()
                return False

        async def reader():
            while not closed.is_set():
                try:
                    text = await ws.receive_text()
                except WebSocketDisconnect:
                    closed.set()
                    return
                except Exception:
                    closed.set()
                    return
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError:
                    reply = {"type": "error", "msg": "malformed JSON"}
                else:
                    reply = session.handle_message(msg)
                if reply is not None:
                    await send(reply)

        async def ticker():
            period = 1.0 / tick_hz
            next_tick = time.monotonic() + period
            while not closed.is_set():
                delay = next_tick - time.monotonic()
                if delay > 0:
                    await asyncio.sleep(delay)
                next_tick += period
                frame = session.tick()
                if not await send(frame):
                    return
                if session.status == "done" and control_log_dir is not None:
                    _persist_log(session, control_log_dir)

        reader_task = asyncio.create_task(reader())
        ticker_task = asyncio.create_task(ticker())
        await closed.wait()
        for task in (reader_task, ticker_task):
            task.cancel()
        if control_log_dir is not None and session.control_log:
            _persist_log(session, control_log_dir)

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app


def _persist_log(session: Session, directory: str):
    path = Path(directory) / f"session-{session.id}.yaml"
    if path.exists():
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_scenario(session.replay_scenario()), encoding="utf-8")
