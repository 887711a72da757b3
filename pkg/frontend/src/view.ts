// Client view state: the latest server frame plus render-only history.
// No physics lives here; trails are memories of server positions.

import type { Point, StateFrame } from "./protocol.js";

export const STALE_AFTER_MS = 1000;
const TRAIL_LIMIT = 2000;

export class ViewState {
  frame: StateFrame | null = null;
  pursuerTrail: Point[] = [];
  evaderTrail: Point[] = [];
  lastFrameAt = -Infinity;
  lastError: string | null = null;

  pushFrame(frame: StateFrame, nowMs: number): void {
    this.frame = frame;
    this.lastFrameAt = nowMs;
    this.pursuerTrail.push(frame.pursuer);
    this.evaderTrail.push(frame.evader);
    if (this.pursuerTrail.length > TRAIL_LIMIT) this.pursuerTrail.shift();
    if (this.evaderTrail.length > TRAIL_LIMIT) this.evaderTrail.shift();
  }

  reset(): void {
    this.pursuerTrail = [];
    this.evaderTrail = [];
  }

  isStale(nowMs: number): boolean {
    return this.frame !== null && nowMs - this.lastFrameAt > STALE_AFTER_MS;
  }
}
