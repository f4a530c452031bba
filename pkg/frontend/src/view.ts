// Screen <-> font-unit mapping: uniform scale, y flipped (font y grows up,
// screen y grows down). Pan and zoom mutate the transform; the font
// geometry itself always comes from the server untouched.

export type Point = [number, number];

export class ViewState {
  scale: number; // screen pixels per font unit, > 0
  originX: number; // screen x of the font origin
  originY: number; // screen y of the font origin

  constructor(scale = 0.5, originX = 40, originY = 400) {
    if (scale <= 0) throw new Error("view scale must be positive");
    this.scale = scale;
    this.originX = originX;
    this.originY = originY;
  }

  toScreen(p: Point): Point {
    return [this.originX + this.scale * p[0], this.originY - this.scale * p[1]];
  }

  toFont(p: Point): Point {
    return [
      (p[0] - this.originX) / this.scale,
      (this.originY - p[1]) / this.scale,
    ];
  }

  pan(dxScreen: number, dyScreen: number): void {
    this.originX += dxScreen;
    this.originY += dyScreen;
  }

  zoomAt(screenPoint: Point, factor: number): void {
    if (factor <= 0) throw new Error("zoom factor must be positive");
    const anchor = this.toFont(screenPoint);
    this.scale *= factor;
    const moved = this.toScreen(anchor);
    this.originX += screenPoint[0] - moved[0];
    this.originY += screenPoint[1] - moved[1];
  }

  fitBounds(
    bounds: [number, number, number, number],
    width: number,
    height: number,
    margin = 0.1,
  ): void {
    const [x0, y0, x1, y1] = bounds;
    const w = Math.max(x1 - x0, 1e-9);
    const h = Math.max(y1 - y0, 1e-9);
    this.scale = Math.min(
      (width * (1 - 2 * margin)) / w,
      (height * (1 - 2 * margin)) / h,
    );
    const cx = 0.5 * (x0 + x1);
    const cy = 0.5 * (y0 + y1);
    this.originX = width / 2 - this.scale * cx;
    this.originY = height / 2 + this.scale * cy;
  }
}
