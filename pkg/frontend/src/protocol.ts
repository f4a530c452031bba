// Wire types for the session service (see ../../PROTOCOL.md).
// All geometry is in font units; theta is normalized, theta_design is in
// design units. The client does no font math of its own.

export interface AxisMeta {
  tag: string;
  min: number;
  default: number;
  max: number;
}

export interface GlyphGeometry {
  glyph_id: number;
  offset: [number, number];
  points: [number, number][];
  contours: [number, number, boolean][];
  segments: [number, number, number, number][];
  segment_base: number;
}

export interface StatePayload {
  text: string;
  units_per_em: number;
  axes: AxisMeta[];
  theta: number[][];
  theta_design: number[][];
  glyphs: GlyphGeometry[];
  advance: number;
  collision: boolean;
  constraints: { id: number; kind: string; handles: [number, number][] }[];
  solver?: string;
  iterations?: number;
  time?: number;
}

export interface PickPayload {
  found: boolean;
  segment?: number;
  t?: number;
  distance?: number;
  reason?: string;
}

export interface SessionPayload {
  font: string;
  units_per_em: number;
  axes: AxisMeta[];
}

export interface ServerMessage {
  type: "session" | "state" | "pick" | "constraint" | "collision" | "error";
  session: string | null;
  payload: Record<string, unknown>;
}

export interface ClientMessage {
  type:
    | "load_font"
    | "set_text"
    | "set_axes"
    | "pick"
    | "drag"
    | "add_constraint"
    | "remove_constraint"
    | "set_collision"
    | "step_sim"
    | "state";
  session?: string;
  payload: Record<string, unknown>;
}

export function encode(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

export function decode(text: string): ServerMessage {
  const parsed = JSON.parse(text) as ServerMessage;
  if (!parsed || typeof parsed.type !== "string") {
    throw new Error("malformed server message");
  }
  return parsed;
}

export function statePayload(msg: ServerMessage): StatePayload {
  if (msg.type !== "state") throw new Error(`expected state, got ${msg.type}`);
  return msg.payload as unknown as StatePayload;
}

export function pickPayload(msg: ServerMessage): PickPayload {
  if (msg.type !== "pick") throw new Error(`expected pick, got ${msg.type}`);
  return msg.payload as unknown as PickPayload;
}
