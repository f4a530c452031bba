// Pointer-to-protocol state machine for outline dragging.
//
// pointer-down sends a pick; while a handle is selected, pointer moves
// become drag messages with at most one in flight and only the latest
// queued (stale targets are dropped), throttled to at most one send per
// minSendInterval ms. pointer-up flushes the last target and ends the
// gesture; a NoHandle pick reply clears the selection.

import { EditorClient } from "./client.js";
import {
  PickPayload,
  ServerMessage,
  StatePayload,
  pickPayload,
  statePayload,
} from "./protocol.js";
import { Point, ViewState } from "./view.js";

export interface Handle {
  segment: number;
  t: number;
}

export class DragController {
  selected: Handle | null = null;
  private dragInFlight = false;
  private pendingTarget: Point | null = null;
  private lastSend = -Infinity;
  private flushTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private client: EditorClient,
    private view: ViewState,
    public session: string,
    public onState: (state: StatePayload) => void,
    private minSendInterval = 1000 / 60,
    private now: () => number = () => Date.now(),
  ) {}

  async pointerDown(screen: Point): Promise<PickPayload> {
    const [x, y] = this.view.toFont(screen);
    const reply = await this.client.request({
      type: "pick",
      session: this.session,
      payload: { x, y },
    });
    const pick = pickPayload(reply);
    if (pick.found) {
      this.selected = { segment: pick.segment!, t: pick.t! };
    } else {
      this.selected = null;
    }
    return pick;
  }

  pointerMove(screen: Point): void {
    if (!this.selected) return;
    this.pendingTarget = this.view.toFont(screen);
    this.maybeSend();
  }

  pointerUp(): void {
    // flush the last queued target, then drop the selection when the
    // in-flight drag settles
    if (this.pendingTarget && !this.dragInFlight) this.maybeSend(true);
    this.selected = null;
  }

  private maybeSend(force = false): void {
    if (!this.pendingTarget || this.dragInFlight) return;
    const wait = this.minSendInterval - (this.now() - this.lastSend);
    if (!force && wait > 0) {
      if (this.flushTimer === null) {
        this.flushTimer = setTimeout(() => {
          this.flushTimer = null;
          this.maybeSend(true);
        }, wait);
      }
      return;
    }
    const handle = this.selected;
    if (!handle) {
      this.pendingTarget = null;
      return;
    }
    const target = this.pendingTarget;
    this.pendingTarget = null;
    this.dragInFlight = true;
    this.lastSend = this.now();
    this.client
      .request({
        type: "drag",
        session: this.session,
        payload: { segment: handle.segment, t: handle.t, target },
      })
      .then((reply: ServerMessage) => {
        this.dragInFlight = false;
        if (reply.type === "state") this.onState(statePayload(reply));
        if (this.pendingTarget) this.maybeSend();
      })
      .catch(() => {
        this.dragInFlight = false;
      });
  }

  get hasPendingWork(): boolean {
    return this.dragInFlight || this.pendingTarget !== null;
  }
}
