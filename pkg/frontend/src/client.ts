// Session client over a WebSocket-like transport.
//
// The service answers each message with exactly one reply, in order, so
// request/reply pairing is a FIFO of pending resolvers. The transport is
// injected (browser WebSocket in main.ts, `ws` in the node tests).

import { ClientMessage, ServerMessage, decode, encode } from "./protocol.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "message" | "open" | "close" | "error",
    listener: (event: { data?: unknown }) => void,
  ): void;
}

export class EditorClient {
  private pending: {
    resolve: (msg: ServerMessage) => void;
    reject: (err: Error) => void;
  }[] = [];
  private listeners: ((msg: ServerMessage) => void)[] = [];
  private closed = false;

  constructor(private socket: WebSocketLike) {
    socket.addEventListener("message", (event) => {
      const text = typeof event.data === "string" ? event.data : String(event.data);
      let msg: ServerMessage;
      try {
        msg = decode(text);
      } catch {
        return; // not a protocol frame; ignore
      }
      const waiter = this.pending.shift();
      if (waiter) waiter.resolve(msg);
      for (const listener of this.listeners) listener(msg);
    });
    socket.addEventListener("close", () => {
      this.closed = true;
      while (this.pending.length) {
        this.pending.shift()!.reject(new Error("connection closed"));
      }
    });
  }

  onMessage(listener: (msg: ServerMessage) => void): void {
    this.listeners.push(listener);
  }

  request(msg: ClientMessage): Promise<ServerMessage> {
    if (this.closed) return Promise.reject(new Error("connection closed"));
    const promise = new Promise<ServerMessage>((resolve, reject) => {
      this.pending.push({ resolve, reject });
    });
    this.socket.send(encode(msg));
    return promise;
  }

  get inFlight(): number {
    return this.pending.length;
  }
}
