// Wire types for the arena JSON protocol, plus defensive parsing.
// The client renders only what the server sends; nothing here simulates.

export type Point = [number, number];

export interface DiscShape {
  c: Point;
  r: number;
}

export interface TargetSpec {
  kind: string;
  [key: string]: unknown;
}

export interface Outcome {
  kind: string;
  t_f?: number;
  t?: number;
  x_f?: Point;
  x?: Point;
}

export interface StateFrame {
  type: "state";
  t: number;
  pursuer: Point;
  evader: Point;
  ac: DiscShape;
  cap: DiscShape;
  d_min: number;
  V: number;
  znorm: number;
  targets: TargetSpec[];
  outcome: Outcome | null;
}

export interface ErrorFrame {
  type: "error";
  msg: string;
}

export type ServerFrame = StateFrame | ErrorFrame;

export interface ControlMessage {
  type: "control";
  heading: Point;
  speed: number;
}

function isPoint(v: unknown): v is Point {
  return (
    Array.isArray(v) &&
    v.length === 2 &&
    typeof v[0] === "number" &&
    typeof v[1] === "number" &&
    Number.isFinite(v[0]) &&
    Number.isFinite(v[1])
  );
}

function isDisc(v: unknown): v is DiscShape {
  if (typeof v !== "object" || v === null) return false;
  const d = v as Record<string, unknown>;
  return isPoint(d.c) && typeof d.r === "number" && Number.isFinite(d.r);
}

/** Parse one server frame; throws on anything that does not match the protocol. */
export function parseServerFrame(text: string): ServerFrame {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    throw new Error("frame is not valid JSON");
  }
  if (typeof data !== "object" || data === null) {
    throw new Error("frame must be a JSON object");
  }
  const obj = data as Record<string, unknown>;
  if (obj.type === "error") {
    if (typeof obj.msg !== "string") throw new Error("error frame without msg");
    return { type: "error", msg: obj.msg };
  }
  if (obj.type !== "state") {
    throw new Error(`unknown frame type ${String(obj.type)}`);
  }
  if (
    typeof obj.t !== "number" ||
    !isPoint(obj.pursuer) ||
    !isPoint(obj.evader) ||
    !isDisc(obj.ac) ||
    !isDisc(obj.cap) ||
    typeof obj.d_min !== "number" ||
    typeof obj.V !== "number" ||
    typeof obj.znorm !== "number" ||
    !Array.isArray(obj.targets)
  ) {
    throw new Error("malformed state frame");
  }
  const outcome = obj.outcome ?? null;
  if (outcome !== null && (typeof outcome !== "object" || typeof (outcome as Outcome).kind !== "string")) {
    throw new Error("malformed outcome");
  }
  return {
    type: "state",
    t: obj.t,
    pursuer: obj.pursuer,
    evader: obj.evader,
    ac: obj.ac,
    cap: obj.cap,
    d_min: obj.d_min,
    V: obj.V,
    znorm: obj.znorm,
    targets: obj.targets as TargetSpec[],
    outcome: outcome as Outcome | null,
  };
}

export function controlMessage(headingX: number, headingY: number, speed: number): ControlMessage {
  return { type: "control", heading: [headingX, headingY], speed };
}
