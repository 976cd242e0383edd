import { describe, expect, it } from "vitest";

import { ChartRecorder } from "../src/charts";
import { makeFrame } from "./helpers";

describe("recording", () => {
  it("pause stops appends, resume continues", () => {
    const rec = new ChartRecorder(100);
    rec.record(makeFrame(0));
    rec.paused = true;
    rec.record(makeFrame(1));
    rec.record(makeFrame(2));
    rec.paused = false;
    rec.record(makeFrame(3));
    expect(rec.visible().map((s) => s.t)).toEqual([0, 3]);
  });

  it("keeps every gating layer for the layer selector", () => {
    const rec = new ChartRecorder(10);
    rec.record(makeFrame(0));
    expect(rec.layerCount()).toBe(2);
    rec.layer = 1;
    expect(rec.visible()[0]?.experts[1]).toEqual([0.1, 0.2, 0.3, 0.4]);
  });
});

describe("csv export", () => {
  it("has columns t, alpha_1..alpha_N, lambda", () => {
    const rec = new ChartRecorder(10);
    rec.record(makeFrame(5, 4, { lambda: 0.25 }));
    const lines = rec.exportCsv().trimEnd().split("\n");
    expect(lines[0]).toBe("t,alpha_1,alpha_2,alpha_3,alpha_4,lambda");
    expect(lines[1]).toBe("5,0.25,0.25,0.25,0.25,0.25");
  });

  it("round-trips received floats exactly", () => {
    const rec = new ChartRecorder(10);
    const lambdas = [0, 1 / 3, 0.1 + 0.2, 59 / 60, 1];
    lambdas.forEach((lam, t) => {
      rec.record(
        makeFrame(t, 4, { lambda: lam, experts: [[lam, 1 - lam]] }),
      );
    });
    const lines = rec.exportCsv().trimEnd().split("\n").slice(1);
    lines.forEach((line, i) => {
      const cells = line.split(",");
      expect(Number(cells[cells.length - 1])).toBe(lambdas[i]);
      expect(Number(cells[1])).toBe(lambdas[i]);
    });
  });

  it("exports the selected layer", () => {
    const rec = new ChartRecorder(10);
    rec.record(makeFrame(0));
    rec.layer = 1;
    const lines = rec.exportCsv().trimEnd().split("\n");
    expect(lines[1]).toBe("0,0.1,0.2,0.3,0.4,0");
  });

  it("exports only the visible window", () => {
    const rec = new ChartRecorder(3);
    for (let t = 0; t < 8; t += 1) rec.record(makeFrame(t));
    const lines = rec.exportCsv().trimEnd().split("\n");
    expect(lines).toHaveLength(4);
    expect(lines[1]?.startsWith("5,")).toBe(true);
    expect(lines[3]?.startsWith("7,")).toBe(true);
  });
});
