import { describe, expect, it } from "vitest";

import { controlMessage, parseServerFrame } from "../src/protocol.js";

const STATE = {
  type: "state",
  t: 0.0,
  pursuer: [0, 0],
  evader: [0, 1],
  ac: { c: [0, 4 / 3], r: 2 / 3 },
  cap: { c: [0, 4 / 3], r: 23 / 30 },
  d_min: 0.1,
  V: 0.01,
  znorm: 0.1,
  targets: [{ kind: "point", at: [0, 3] }],
  outcome: null,
};

describe("parseServerFrame", () => {
  it("accepts a well-formed state frame", () => {
    const frame = parseServerFrame(JSON.stringify(STATE));
    expect(frame.type).toBe("state");
    if (frame.type === "state") {
      expect(frame.t).toBe(0);
      expect(frame.cap.r).toBeCloseTo(23 / 30, 12);
      expect(frame.outcome).toBeNull();
      expect(frame.targets).toHaveLength(1);
    }
  });

  it("accepts an outcome-bearing frame", () => {
    const withOutcome = { ...STATE, outcome: { kind: "captured", t_f: 2.0, x_f: [0, 2] } };
    const frame = parseServerFrame(JSON.stringify(withOutcome));
    if (frame.type === "state") {
      expect(frame.outcome?.kind).toBe("captured");
    }
  });

  it("accepts error frames", () => {
    const frame = parseServerFrame(JSON.stringify({ type: "error", msg: "nope" }));
    expect(frame).toEqual({ type: "error", msg: "nope" });
  });

  it.each([
    ["not json", "garbage{"],
    ["wrong type", JSON.stringify({ type: "telemetry" })],
    ["missing discs", JSON.stringify({ ...STATE, ac: null })],
    ["bad point", JSON.stringify({ ...STATE, evader: [1] })],
    ["non-numeric", JSON.stringify({ ...STATE, d_min: "small" })],
  ])("rejects %s", (_label, text) => {
    expect(() => parseServerFrame(text)).toThrow();
  });
});

describe("controlMessage", () => {
  it("matches the wire schema exactly", () => {
    expect(controlMessage(0.6, -0.8, 0.5)).toEqual({
      type: "control",
      heading: [0.6, -0.8],
      speed: 0.5,
    });
  });
});
