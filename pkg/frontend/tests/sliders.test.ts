import { describe, expect, it } from "vitest";

import { AxisMeta } from "../src/protocol.js";
import { SliderPanel, SliderWidget } from "../src/sliders.js";

class FakeWidget implements SliderWidget {
  value = 0;
  private handlers: ((v: number) => void)[] = [];
  setValue(v: number): void {
    this.value = v;
  }
  getValue(): number {
    return this.value;
  }
  onInput(handler: (v: number) => void): void {
    this.handlers.push(handler);
  }
  userMove(v: number): void {
    this.value = v;
    for (const h of this.handlers) h(v);
  }
}

const WGHT: AxisMeta = { tag: "wght", min: 100, default: 400, max: 900 };
const WDTH: AxisMeta = { tag: "wdth", min: 50, default: 100, max: 200 };

function makePanel() {
  const widgets: FakeWidget[] = [];
  const emitted: [string, number][] = [];
  const panel = new SliderPanel(
    () => {
      const w = new FakeWidget();
      widgets.push(w);
      return w;
    },
    (tag, value) => emitted.push([tag, value]),
  );
  panel.build([WGHT, WDTH]);
  return { panel, widgets, emitted };
}

describe("SliderPanel", () => {
  it("starts at the axis defaults", () => {
    const { widgets } = makePanel();
    expect(widgets[0].value).toBe(400);
    expect(widgets[1].value).toBe(100);
  });

  it("user input emits a set_axes change", () => {
    const { widgets, emitted } = makePanel();
    widgets[0].userMove(700);
    expect(emitted).toEqual([["wght", 700]]);
  });

  it("server pushes move sliders without re-emitting (no echo loop)", () => {
    const { panel, widgets, emitted } = makePanel();
    panel.update([WGHT, WDTH], [[525, 150]]);
    expect(widgets[0].value).toBe(525);
    expect(widgets[1].value).toBe(150);
    expect(emitted).toEqual([]);
  });

  it("out-of-range input clamps to the axis bounds", () => {
    const { widgets, emitted } = makePanel();
    widgets[0].userMove(2000);
    expect(emitted).toEqual([["wght", 900]]);
    expect(widgets[0].value).toBe(900);
    widgets[1].userMove(-10);
    expect(emitted[1]).toEqual(["wdth", 50]);
  });

  it("a push-then-user cycle emits exactly once", () => {
    const { panel, widgets, emitted } = makePanel();
    panel.update([WGHT, WDTH], [[600, 120]]);
    widgets[0].userMove(650);
    panel.update([WGHT, WDTH], [[650, 120]]); // server confirms
    expect(emitted).toEqual([["wght", 650]]);
  });
});
