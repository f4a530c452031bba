// Canvas drawing of a state reply: outlines as cubic paths, the selected
// handle as a marker, collider geometry as an overlay. Outline geometry is
// used exactly as the server sent it.

import { GlyphGeometry, StatePayload } from "./protocol.js";
import { Handle } from "./drag.js";
import { Point, ViewState } from "./view.js";

// The narrow slice of CanvasRenderingContext2D the renderer touches;
// tests drive it with a recording stub.
export interface Canvas2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  bezierCurveTo(
    c1x: number, c1y: number, c2x: number, c2y: number, x: number, y: number,
  ): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
}

export interface SceneOverlay {
  walls: [Point, Point][];
  polygons: Point[][];
}

export interface RenderStats {
  paths: number;
  handles: number;
}

export function glyphPath(ctx: Canvas2D, glyph: GlyphGeometry, view: ViewState): boolean {
  let drew = false;
  for (const [start, count, closed] of glyph.contours) {
    const nSeg = closed ? Math.floor(count / 3) : Math.floor((count - 1) / 3);
    if (nSeg <= 0 || start + count > glyph.points.length) continue; // defensive
    const p0 = view.toScreen(glyph.points[start]);
    ctx.moveTo(p0[0], p0[1]);
    for (let i = 0; i < nSeg; i++) {
      const a = start + 3 * i;
      const d = closed ? start + ((3 * (i + 1)) % count) : a + 3;
      const c1 = view.toScreen(glyph.points[a + 1]);
      const c2 = view.toScreen(glyph.points[a + 2]);
      const b = view.toScreen(glyph.points[d]);
      ctx.bezierCurveTo(c1[0], c1[1], c2[0], c2[1], b[0], b[1]);
    }
    if (closed) ctx.closePath();
    drew = true;
  }
  return drew;
}

function cubicAt(glyph: GlyphGeometry, seg: number, t: number): Point {
  const [i0, i1, i2, i3] = glyph.segments[seg];
  const u = 1 - t;
  const w = [u * u * u, 3 * u * u * t, 3 * u * t * t, t * t * t];
  const pts = [glyph.points[i0], glyph.points[i1], glyph.points[i2], glyph.points[i3]];
  let x = 0;
  let y = 0;
  for (let k = 0; k < 4; k++) {
    x += w[k] * pts[k][0];
    y += w[k] * pts[k][1];
  }
  return [x, y];
}

export function renderFrame(
  ctx: Canvas2D,
  state: StatePayload,
  view: ViewState,
  options: {
    width: number;
    height: number;
    selected?: Handle | null;
    scene?: SceneOverlay | null;
  },
): RenderStats {
  ctx.clearRect(0, 0, options.width, options.height);
  let paths = 0;
  for (const glyph of state.glyphs) {
    try {
      ctx.beginPath();
      if (!glyphPath(ctx, glyph, view)) continue;
      ctx.fillStyle = "#1a1a1a";
      ctx.globalAlpha = 0.9;
      ctx.fill();
      ctx.globalAlpha = 1.0;
      ctx.strokeStyle = "#444";
      ctx.lineWidth = 1;
      ctx.stroke();
      paths += 1;
    } catch {
      continue; // defensive draw: a malformed glyph never kills the frame
    }
  }

  if (options.scene) {
    ctx.strokeStyle = "#c0392b";
    ctx.lineWidth = 2;
    for (const [a, b] of options.scene.walls) {
      const sa = view.toScreen(a);
      const sb = view.toScreen(b);
      ctx.beginPath();
      ctx.moveTo(sa[0], sa[1]);
      ctx.lineTo(sb[0], sb[1]);
      ctx.stroke();
    }
    for (const poly of options.scene.polygons) {
      ctx.beginPath();
      const first = view.toScreen(poly[0]);
      ctx.moveTo(first[0], first[1]);
      for (const p of poly.slice(1)) {
        const sp = view.toScreen(p);
        ctx.lineTo(sp[0], sp[1]);
      }
      ctx.closePath();
      ctx.globalAlpha = 0.25;
      ctx.fillStyle = "#c0392b";
      ctx.fill();
      ctx.globalAlpha = 1.0;
      ctx.stroke();
    }
  }

  let handles = 0;
  if (options.selected) {
    const { segment, t } = options.selected;
    const glyph = state.glyphs.find(
      (g) =>
        segment >= g.segment_base && segment < g.segment_base + g.segments.length,
    );
    if (glyph) {
      const p = view.toScreen(cubicAt(glyph, segment - glyph.segment_base, t));
      ctx.beginPath();
      ctx.arc(p[0], p[1], 5, 0, 2 * Math.PI);
      ctx.fillStyle = "#2563eb";
      ctx.fill();
      ctx.strokeStyle = "#ffffff";
      ctx.lineWidth = 1.5;
      ctx.stroke();
      handles += 1;
    }
  }
  return { paths, handles };
}
