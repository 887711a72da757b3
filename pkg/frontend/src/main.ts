// Page wiring: canvas, pointer tracking, control loop, render loop.
// Physics never runs here; every drawn position came from a server frame.

import { fitCamera, worldToScreen } from "./camera.js";
import { pointerToControl } from "./input.js";
import { ArenaClient } from "./net.js";
import { buildScene, drawScene, hudLines, MinimalCtx } from "./render.js";
import { ViewState } from "./view.js";

const CONTROL_HZ = 25; // >= 20 Hz control emission
const DEADBAND_PX = 120; // pointer this far from the evader commands full speed

function wsUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const explicit = params.get("ws");
  if (explicit) return explicit;
  const proto = window.location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${window.location.host}/arena`;
}

function main(): void {
  const canvas = document.getElementById("arena") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d") as unknown as MinimalCtx;
  const view = new ViewState();

  const resize = () => {
    canvas.width = window.innerWidth;
    canvas.height = window.innerHeight - 48;
  };
  resize();
  window.addEventListener("resize", resize);

  let pointer: { x: number; y: number } | null = null;
  let lastControl: { heading: [number, number]; speed: number } = { heading: [0, 0], speed: 0 };
  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    pointer = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  });
  canvas.addEventListener("pointerleave", () => {
    pointer = null; // hold the last control while the pointer is off-canvas
  });

  const client = new ArenaClient(wsUrl(), {
    onFrame: (frame) => {
      if (frame.type === "state") {
        if (view.frame && frame.t < view.frame.t) view.reset(); // server was reset
        view.pushFrame(frame, performance.now());
        view.lastError = null;
      } else {
        view.lastError = frame.msg;
      }
    },
    onClose: () => {
      view.lastError = "connection closed";
    },
  });

  (document.getElementById("start") as HTMLButtonElement).onclick = () => client.start();
  (document.getElementById("pause") as HTMLButtonElement).onclick = () => client.pause();
  (document.getElementById("reset") as HTMLButtonElement).onclick = () => {
    client.reset();
    view.reset();
  };

  window.setInterval(() => {
    const frame = view.frame;
    if (!frame) return;
    if (pointer) {
      const cam = fitCamera(frame, canvas.width, canvas.height);
      const evaderPx = worldToScreen(cam, frame.evader);
      lastControl = pointerToControl(pointer.x, pointer.y, evaderPx.x, evaderPx.y, DEADBAND_PX);
    }
    client.sendControl(lastControl.heading[0], lastControl.heading[1], lastControl.speed);
  }, 1000 / CONTROL_HZ);

  const paint = () => {
    if (view.frame) {
      const cam = fitCamera(view.frame, canvas.width, canvas.height);
      drawScene(ctx, buildScene(view, cam), hudLines(view, performance.now()),
                canvas.width, canvas.height);
    }
    window.requestAnimationFrame(paint);
  };
  window.requestAnimationFrame(paint);
}

main();
