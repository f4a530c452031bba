// Axis sliders in design units, bidirectional without echo loops: server
// pushes move the widgets behind a guard flag, so only real user input
// emits set_axes.

import { AxisMeta } from "./protocol.js";

export interface SliderWidget {
  setValue(value: number): void;
  getValue(): number;
  onInput(handler: (value: number) => void): void;
}

export type SliderFactory = (axis: AxisMeta) => SliderWidget;

export class SliderPanel {
  private widgets = new Map<string, SliderWidget>();
  private updating = false;
  emitted: { tag: string; value: number }[] = [];

  constructor(
    private factory: SliderFactory,
    private onAxisChange: (tag: string, designValue: number) => void,
  ) {}

  build(axes: AxisMeta[]): void {
    this.widgets.clear();
    for (const axis of axes) {
      const widget = this.factory(axis);
      widget.setValue(axis.default);
      widget.onInput((raw) => {
        if (this.updating) return; // programmatic move, not user intent
        const clamped = Math.min(Math.max(raw, axis.min), axis.max);
        if (clamped !== raw) widget.setValue(clamped);
        this.emitted.push({ tag: axis.tag, value: clamped });
        this.onAxisChange(axis.tag, clamped);
      });
      this.widgets.set(axis.tag, widget);
    }
  }

  /** Reflect a server state push; never re-emits set_axes. */
  update(axes: AxisMeta[], designValues: number[][]): void {
    if (designValues.length === 0) return;
    const first = designValues[0];
    this.updating = true;
    try {
      axes.forEach((axis, i) => {
        const widget = this.widgets.get(axis.tag);
        if (widget && i < first.length) widget.setValue(first[i]);
      });
    } finally {
      this.updating = false;
    }
  }

  value(tag: string): number | undefined {
    return this.widgets.get(tag)?.getValue();
  }
}
