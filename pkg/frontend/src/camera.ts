// World <-> screen transform. World y points up, canvas y points down.

import type { Point, StateFrame, TargetSpec } from "./protocol.js";

export interface Camera {
  scale: number; // pixels per world unit
  cx: number; // world point mapped to the canvas center
  cy: number;
  width: number;
  height: number;
}

function targetExtent(t: TargetSpec): Point[] {
  switch (t.kind) {
    case "point":
      return [t.at as Point];
    case "segment":
      return [t.a as Point, t.b as Point];
    case "disc": {
      const c = t.center as Point;
      const r = t.radius as number;
      return [
        [c[0] - r, c[1] - r],
        [c[0] + r, c[1] + r],
      ];
    }
    case "polyline":
      return t.points as Point[];
    case "vertical_line": {
      const x = t.x as number;
      const range = (t.y_range as Point | undefined) ?? null;
      return range === null ? [[x, 0]] : [[x, range[0]], [x, range[1]]];
    }
    default:
      return [];
  }
}

/** Frame the fixed capture disc, the agents and all targets with a margin. */
export function fitCamera(frame: StateFrame, width: number, height: number,
                          marginFrac = 0.12): Camera {
  const pts: Point[] = [
    frame.pursuer,
    frame.evader,
    [frame.cap.c[0] - frame.cap.r, frame.cap.c[1] - frame.cap.r],
    [frame.cap.c[0] + frame.cap.r, frame.cap.c[1] + frame.cap.r],
  ];
  for (const t of frame.targets) pts.push(...targetExtent(t));
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const [x, y] of pts) {
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    minY = Math.min(minY, y);
    maxY = Math.max(maxY, y);
  }
  const spanX = Math.max(maxX - minX, 1e-6);
  const spanY = Math.max(maxY - minY, 1e-6);
  const usable = 1 - 2 * marginFrac;
  const scale = Math.min((width * usable) / spanX, (height * usable) / spanY);
  return {
    scale,
    cx: (minX + maxX) / 2,
    cy: (minY + maxY) / 2,
    width,
    height,
  };
}

export function worldToScreen(cam: Camera, p: Point): { x: number; y: number } {
  return {
    x: cam.width / 2 + (p[0] - cam.cx) * cam.scale,
    y: cam.height / 2 - (p[1] - cam.cy) * cam.scale,
  };
}

export function screenToWorld(cam: Camera, x: number, y: number): Point {
  return [
    cam.cx + (x - cam.width / 2) / cam.scale,
    cam.cy - (y - cam.height / 2) / cam.scale,
  ];
}
