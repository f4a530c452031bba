import { describe, expect, it } from "vitest";

import { Canvas2D, renderFrame } from "../src/render.js";
import { GlyphGeometry, StatePayload } from "../src/protocol.js";
import { ViewState } from "../src/view.js";

class RecordingCtx implements Canvas2D {
  ops: string[] = [];
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  lineWidth = 1;
  globalAlpha = 1;
  clearRect(): void {
    this.ops.push("clear");
  }
  beginPath(): void {
    this.ops.push("begin");
  }
  moveTo(): void {
    this.ops.push("move");
  }
  lineTo(): void {
    this.ops.push("line");
  }
  bezierCurveTo(): void {
    this.ops.push("cubic");
  }
  closePath(): void {
    this.ops.push("close");
  }
  fill(): void {
    this.ops.push("fill");
  }
  stroke(): void {
    this.ops.push("stroke");
  }
  arc(): void {
    this.ops.push("arc");
  }
}

function rectGlyph(base = 0): GlyphGeometry {
  // 4-segment wrap-form rectangle plus two phantom points
  const anchors: [number, number][] = [
    [0, 0],
    [100, 0],
    [100, 200],
    [0, 200],
  ];
  const points: [number, number][] = [];
  for (let i = 0; i < 4; i++) {
    const a = anchors[i];
    const b = anchors[(i + 1) % 4];
    points.push(a);
    points.push([a[0] + (b[0] - a[0]) / 3, a[1] + (b[1] - a[1]) / 3]);
    points.push([a[0] + (2 * (b[0] - a[0])) / 3, a[1] + (2 * (b[1] - a[1])) / 3]);
  }
  points.push([0, 0], [120, 0]);
  const segments: [number, number, number, number][] = [];
  for (let i = 0; i < 4; i++) {
    segments.push([3 * i, 3 * i + 1, 3 * i + 2, (3 * (i + 1)) % 12]);
  }
  return {
    glyph_id: 1,
    offset: [0, 0],
    points,
    contours: [[0, 12, true]],
    segments,
    segment_base: base,
  };
}

function makeState(glyphs: GlyphGeometry[]): StatePayload {
  return {
    text: "x",
    units_per_em: 1000,
    axes: [{ tag: "wght", min: 100, default: 400, max: 900 }],
    theta: [[0]],
    theta_design: [[400]],
    glyphs,
    advance: 120,
    collision: false,
    constraints: [],
  };
}

describe("renderFrame", () => {
  it("empty text clears the canvas and draws nothing", () => {
    const ctx = new RecordingCtx();
    const stats = renderFrame(ctx, makeState([]), new ViewState(), {
      width: 960,
      height: 720,
    });
    expect(ctx.ops[0]).toBe("clear");
    expect(stats.paths).toBe(0);
  });

  it("path count equals glyph count", () => {
    const ctx = new RecordingCtx();
    const stats = renderFrame(
      ctx,
      makeState([rectGlyph(0), rectGlyph(4)]),
      new ViewState(),
      { width: 960, height: 720 },
    );
    expect(stats.paths).toBe(2);
    expect(ctx.ops.filter((o) => o === "cubic").length).toBe(8);
  });

  it("draws the selected handle marker", () => {
    const ctx = new RecordingCtx();
    const stats = renderFrame(ctx, makeState([rectGlyph(0)]), new ViewState(), {
      width: 960,
      height: 720,
      selected: { segment: 1, t: 0.5 },
    });
    expect(stats.handles).toBe(1);
    expect(ctx.ops).toContain("arc");
  });

  it("skips malformed glyphs defensively", () => {
    const broken = rectGlyph(0);
    broken.contours = [[0, 900, true]]; // out of range
    const ctx = new RecordingCtx();
    const stats = renderFrame(
      ctx,
      makeState([broken, rectGlyph(4)]),
      new ViewState(),
      { width: 960, height: 720 },
    );
    expect(stats.paths).toBe(1);
  });

  it("overlays collider geometry", () => {
    const ctx = new RecordingCtx();
    renderFrame(ctx, makeState([rectGlyph(0)]), new ViewState(), {
      width: 960,
      height: 720,
      scene: {
        walls: [[[0, 0], [100, 0]]],
        polygons: [[[0, 0], [10, 0], [10, 10]]],
      },
    });
    expect(ctx.ops.filter((o) => o === "line").length).toBeGreaterThan(1);
  });
});
