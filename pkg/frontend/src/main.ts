// Browser entry point: wires the canvas, sliders, constraint toolbar and
// collision toggle to the session service.

import { EditorClient } from "./client.js";
import { DragController } from "./drag.js";
import {
  AxisMeta,
  SessionPayload,
  StatePayload,
  statePayload,
} from "./protocol.js";
import { renderFrame, SceneOverlay } from "./render.js";
import { SliderPanel } from "./sliders.js";
import { Point, ViewState } from "./view.js";

type ConstraintTool = "select" | "pin" | "same_x" | "same_y" | "collinear";

const TOOL_ARITY: Record<Exclude<ConstraintTool, "select">, number> = {
  pin: 1,
  same_x: 2,
  same_y: 2,
  collinear: 3,
};

async function boot(): Promise<void> {
  const canvas = document.getElementById("editor") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const slidersDiv = document.getElementById("sliders")!;
  const textInput = document.getElementById("text") as HTMLInputElement;
  const fontSelect = document.getElementById("font") as HTMLSelectElement;
  const collisionToggle = document.getElementById(
    "collision",
  ) as HTMLInputElement;
  const toolbar = document.getElementById("toolbar")!;
  const status = document.getElementById("status")!;

  const proto = location.protocol === "https:" ? "wss" : "ws";
  const socket = new WebSocket(`${proto}://${location.host}/ws`);
  await new Promise<void>((resolve, reject) => {
    socket.addEventListener("open", () => resolve());
    socket.addEventListener("error", () => reject(new Error("ws failed")));
  });
  const client = new EditorClient(socket);

  const view = new ViewState();
  let state: StatePayload | null = null;
  let session = "";
  let axes: AxisMeta[] = [];
  let tool: ConstraintTool = "select";
  let pendingHandles: [number, number][] = [];
  let scene: SceneOverlay | null = null;

  const sliders = new SliderPanel(
    (axis) => makeDomSlider(slidersDiv, axis),
    (tag, value) => {
      void client
        .request({
          type: "set_axes",
          session,
          payload: { axes: { [tag]: value } },
        })
        .then(handleReply);
    },
  );

  const drag = new DragController(
    client,
    view,
    "",
    () => undefined,
  );

  function applyState(payload: StatePayload): void {
    state = payload;
    sliders.update(axes, payload.theta_design);
    redraw();
    status.textContent =
      `advance ${payload.advance.toFixed(1)}  ` +
      `theta ${payload.theta.map((row) => row.map((v) => v.toFixed(3)).join(",")).join(" | ")}`;
  }

  function handleReply(msg: { type: string; payload: unknown }): void {
    if (msg.type === "state") applyState(msg.payload as StatePayload);
    if (msg.type === "error") {
      status.textContent = `error: ${(msg.payload as { message: string }).message}`;
    }
  }

  function redraw(): void {
    if (!state) return;
    renderFrame(ctx, state, view, {
      width: canvas.width,
      height: canvas.height,
      selected: drag.selected,
      scene,
    });
  }

  async function openSession(fontName: string, text: string): Promise<void> {
    const hello = await client.request({
      type: "load_font",
      payload: { font: fontName },
    });
    if (hello.type !== "session") throw new Error("load_font failed");
    session = hello.session as string;
    const info = hello.payload as unknown as SessionPayload;
    axes = info.axes;
    slidersDiv.innerHTML = "";
    sliders.build(axes);
    drag.session = session;
    const first = await client.request({
      type: "set_text",
      session,
      payload: { text },
    });
    const payload = statePayload(first);
    const xs = payload.glyphs.flatMap((g) => g.points.map((p) => p[0]));
    const ys = payload.glyphs.flatMap((g) => g.points.map((p) => p[1]));
    view.fitBounds(
      [Math.min(...xs), Math.min(...ys), Math.max(...xs), Math.max(...ys)],
      canvas.width,
      canvas.height,
    );
    applyState(payload);
  }

  canvas.addEventListener("pointerdown", async (event) => {
    const screen: Point = [event.offsetX, event.offsetY];
    if (tool === "select") {
      await drag.pointerDown(screen);
      redraw();
      return;
    }
    // constraint tools collect handles by picking
    const pick = await drag.pointerDown(screen);
    drag.selected = null;
    if (!pick.found) return;
    pendingHandles.push([pick.segment!, pick.t!]);
    const arity = TOOL_ARITY[tool];
    status.textContent = `${tool}: ${pendingHandles.length}/${arity} handles`;
    if (pendingHandles.length >= arity) {
      const payload: Record<string, unknown> = {
        kind: tool,
        handles: pendingHandles,
      };
      if (tool === "pin") {
        payload.targets = pendingHandles.map(([seg, t]) => {
          const glyph = state!.glyphs.find(
            (g) => seg >= g.segment_base && seg < g.segment_base + g.segments.length,
          )!;
          const [i0] = glyph.segments[seg - glyph.segment_base];
          return glyph.points[i0];
        });
      }
      await client.request({ type: "add_constraint", session, payload });
      pendingHandles = [];
      tool = "select";
      updateToolbar();
    }
  });

  canvas.addEventListener("pointermove", (event) => {
    if (tool !== "select") return;
    drag.pointerMove([event.offsetX, event.offsetY]);
  });
  canvas.addEventListener("pointerup", () => {
    drag.pointerUp();
    redraw();
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    view.zoomAt([event.offsetX, event.offsetY], event.deltaY < 0 ? 1.1 : 1 / 1.1);
    redraw();
  });

  drag.onState = applyState;

  function updateToolbar(): void {
    for (const button of Array.from(toolbar.querySelectorAll("button"))) {
      button.classList.toggle("active", button.dataset.tool === tool);
    }
  }

  toolbar.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const chosen = target.dataset.tool as ConstraintTool | undefined;
    if (!chosen) return;
    tool = chosen;
    pendingHandles = [];
    updateToolbar();
  });

  collisionToggle.addEventListener("change", () => {
    const on = collisionToggle.checked;
    const sceneText = on ? "wall 420 -100 420 900\n" : "";
    scene = on ? { walls: [[[420, -100], [420, 900]]], polygons: [] } : null;
    void client
      .request({
        type: "set_collision",
        session,
        payload: { on, scene: sceneText },
      })
      .then(() => redraw());
  });

  textInput.addEventListener("change", () => {
    void openSession(fontSelect.value, textInput.value || "I");
  });
  fontSelect.addEventListener("change", () => {
    void openSession(fontSelect.value, textInput.value || "I");
  });

  // discover fonts from the index page's injected list, else default
  const fonts = (window as unknown as { VARFONT_FONTS?: string[] }).VARFONT_FONTS;
  for (const name of fonts ?? ["fix1"]) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    fontSelect.appendChild(option);
  }
  await openSession(fontSelect.value, textInput.value || "I");
}

function makeDomSlider(parent: HTMLElement, axis: AxisMeta) {
  const row = document.createElement("div");
  row.className = "slider-row";
  const label = document.createElement("label");
  label.textContent = axis.tag;
  const input = document.createElement("input");
  input.type = "range";
  input.min = String(axis.min);
  input.max = String(axis.max);
  input.step = "any";
  const number = document.createElement("input");
  number.type = "number";
  number.min = String(axis.min);
  number.max = String(axis.max);
  row.append(label, input, number);
  parent.appendChild(row);
  const handlers: ((v: number) => void)[] = [];
  const fire = (raw: number) => {
    for (const h of handlers) h(raw);
  };
  input.addEventListener("input", () => fire(Number(input.value)));
  number.addEventListener("change", () => fire(Number(number.value)));
  return {
    setValue(value: number) {
      input.value = String(value);
      number.value = value.toFixed(1);
    },
    getValue() {
      return Number(input.value);
    },
    onInput(handler: (value: number) => void) {
      handlers.push(handler);
    },
  };
}

void boot();
