// Scene construction and drawing.  buildScene is pure (frame + camera in,
// tagged shapes out) so the containment of the dominance disc inside the
// capture ring is testable without a canvas; drawScene just walks the shapes.

import { Camera, worldToScreen } from "./camera.js";
import type { Point, StateFrame, TargetSpec } from "./protocol.js";
import { ViewState } from "./view.js";

export type Role =
  | "ac"
  | "cap"
  | "pursuer"
  | "evader"
  | "target"
  | "trail-pursuer"
  | "trail-evader"
  | "capture-marker";

export interface CircleShape {
  kind: "circle";
  role: Role;
  x: number;
  y: number;
  radius: number;
  stroke: string;
  fill?: string;
  lineWidth: number;
}

export interface PathShape {
  kind: "path";
  role: Role;
  points: { x: number; y: number }[];
  stroke: string;
  lineWidth: number;
}

export interface DotShape {
  kind: "dot";
  role: Role;
  x: number;
  y: number;
  radius: number;
  fill: string;
}

export type Shape = CircleShape | PathShape | DotShape;

const COLORS = {
  ac: "#d43a3a",
  cap: "#222222",
  pursuer: "#2a5bd4",
  evader: "#d43a3a",
  target: "#2a9d3a",
  trailPursuer: "rgba(42, 91, 212, 0.35)",
  trailEvader: "rgba(212, 58, 58, 0.35)",
  capture: "#f0a020",
};

function targetShapes(t: TargetSpec, cam: Camera): Shape[] {
  const seg = (a: Point, b: Point): PathShape => ({
    kind: "path",
    role: "target",
    points: [worldToScreen(cam, a), worldToScreen(cam, b)],
    stroke: COLORS.target,
    lineWidth: 3,
  });
  switch (t.kind) {
    case "point": {
      const p = worldToScreen(cam, t.at as Point);
      return [{ kind: "dot", role: "target", x: p.x, y: p.y, radius: 5, fill: COLORS.target }];
    }
    case "segment":
      return [seg(t.a as Point, t.b as Point)];
    case "disc": {
      const c = worldToScreen(cam, t.center as Point);
      return [{
        kind: "circle", role: "target", x: c.x, y: c.y,
        radius: (t.radius as number) * cam.scale,
        stroke: COLORS.target, fill: "rgba(42, 157, 58, 0.25)", lineWidth: 2,
      }];
    }
    case "polyline": {
      const pts = (t.points as Point[]).map((p) => worldToScreen(cam, p));
      return [{ kind: "path", role: "target", points: pts, stroke: COLORS.target, lineWidth: 3 }];
    }
    case "vertical_line": {
      const x = t.x as number;
      const range = (t.y_range as Point | undefined) ?? null;
      if (range) return [seg([x, range[0]], [x, range[1]])];
      // unbounded wall: span the whole view vertically
      const top = worldToScreen(cam, [x, 0]);
      return [{
        kind: "path", role: "target",
        points: [{ x: top.x, y: 0 }, { x: top.x, y: cam.height }],
        stroke: COLORS.target, lineWidth: 3,
      }];
    }
    default:
      return [];
  }
}

/** Everything to draw for one frame, in paint order. */
export function buildScene(view: ViewState, cam: Camera): Shape[] {
  const frame = view.frame;
  if (!frame) return [];
  const shapes: Shape[] = [];

  const cap = worldToScreen(cam, frame.cap.c);
  shapes.push({
    kind: "circle", role: "cap", x: cap.x, y: cap.y,
    radius: frame.cap.r * cam.scale, stroke: COLORS.cap, lineWidth: 2.5,
  });
  const ac = worldToScreen(cam, frame.ac.c);
  shapes.push({
    kind: "circle", role: "ac", x: ac.x, y: ac.y,
    radius: frame.ac.r * cam.scale, stroke: COLORS.ac,
    fill: "rgba(212, 58, 58, 0.08)", lineWidth: 1.5,
  });

  for (const t of frame.targets) shapes.push(...targetShapes(t, cam));

  for (const [trail, color, role] of [
    [view.pursuerTrail, COLORS.trailPursuer, "trail-pursuer"],
    [view.evaderTrail, COLORS.trailEvader, "trail-evader"],
  ] as const) {
    if (trail.length >= 2) {
      shapes.push({
        kind: "path", role,
        points: trail.map((p) => worldToScreen(cam, p)),
        stroke: color, lineWidth: 1,
      });
    }
  }

  const pu = worldToScreen(cam, frame.pursuer);
  shapes.push({ kind: "dot", role: "pursuer", x: pu.x, y: pu.y, radius: 6, fill: COLORS.pursuer });
  const ev = worldToScreen(cam, frame.evader);
  shapes.push({ kind: "dot", role: "evader", x: ev.x, y: ev.y, radius: 6, fill: COLORS.evader });

  const outcome = frame.outcome;
  if (outcome) {
    const at = outcome.x_f ?? outcome.x ?? frame.evader;
    const m = worldToScreen(cam, at);
    shapes.push({
      kind: "circle", role: "capture-marker", x: m.x, y: m.y,
      radius: 12, stroke: COLORS.capture, lineWidth: 3,
    });
  }
  return shapes;
}

/** HUD readouts: time, caging margin, certificate value, steering magnitude. */
export function hudLines(view: ViewState, nowMs: number): string[] {
  const lines: string[] = [];
  const frame = view.frame;
  if (!frame) {
    lines.push("waiting for server...");
    return lines;
  }
  lines.push(`t = ${frame.t.toFixed(3)}`);
  lines.push(`d_min = ${frame.d_min.toFixed(4)}`);
  lines.push(`V = ${frame.V.toFixed(4)}`);
  lines.push(`|z_P| = ${frame.znorm.toFixed(4)}`);
  if (frame.outcome) {
    const t = frame.outcome.t_f ?? frame.outcome.t;
    lines.push(`outcome: ${frame.outcome.kind}${t !== undefined ? ` @ t=${t.toFixed(3)}` : ""}`);
  }
  if (view.isStale(nowMs)) {
    lines.push("STALE FRAME (no update for 1 s)");
  }
  if (view.lastError) {
    lines.push(`server: ${view.lastError}`);
  }
  return lines;
}

/** Structural subset of CanvasRenderingContext2D the drawer needs (mockable). */
export interface MinimalCtx {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  font: string;
}

export function drawScene(ctx: MinimalCtx, shapes: Shape[], hud: string[],
                          width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  for (const s of shapes) {
    ctx.beginPath();
    if (s.kind === "circle") {
      ctx.arc(s.x, s.y, Math.max(0, s.radius), 0, 2 * Math.PI);
      if (s.fill) {
        ctx.fillStyle = s.fill;
        ctx.fill();
      }
      ctx.strokeStyle = s.stroke;
      ctx.lineWidth = s.lineWidth;
      ctx.stroke();
    } else if (s.kind === "path") {
      const [first, ...rest] = s.points;
      if (!first) continue;
      ctx.moveTo(first.x, first.y);
      for (const p of rest) ctx.lineTo(p.x, p.y);
      ctx.strokeStyle = s.stroke;
      ctx.lineWidth = s.lineWidth;
      ctx.stroke();
    } else {
      ctx.arc(s.x, s.y, s.radius, 0, 2 * Math.PI);
      ctx.fillStyle = s.fill;
      ctx.fill();
    }
  }
  ctx.font = "14px monospace";
  ctx.fillStyle = "#111111";
  hud.forEach((line, i) => ctx.fillText(line, 12, 22 + 18 * i));
}
