// Arena connection: frame dispatch in, control frames out.
// The socket factory is injectable so tests can drive a fake.

import { controlMessage, parseServerFrame, ServerFrame } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ArenaHandlers {
  onFrame(frame: ServerFrame): void;
  onOpen?(): void;
  onClose?(): void;
  onProtocolError?(err: Error): void;
}

export class ArenaClient {
  private socket: SocketLike;
  private handlers: ArenaHandlers;

  constructor(url: string, handlers: ArenaHandlers, factory?: SocketFactory) {
    this.handlers = handlers;
    const make = factory ?? ((u: string) => new WebSocket(u) as unknown as SocketLike);
    this.socket = make(url);
    this.socket.onopen = () => handlers.onOpen?.();
    this.socket.onclose = () => handlers.onClose?.();
    this.socket.onmessage = (ev) => {
      try {
        handlers.onFrame(parseServerFrame(String(ev.data)));
      } catch (err) {
        handlers.onProtocolError?.(err as Error);
      }
    };
  }

  sendControl(headingX: number, headingY: number, speed: number): void {
    this.socket.send(JSON.stringify(controlMessage(headingX, headingY, speed)));
  }

  start(): void {
    this.socket.send(JSON.stringify({ type: "start" }));
  }

  pause(): void {
    this.socket.send(JSON.stringify({ type: "pause" }));
  }

  reset(): void {
    this.socket.send(JSON.stringify({ type: "reset" }));
  }

  close(): void {
    this.socket.close();
  }
}
