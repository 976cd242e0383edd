/**
 * Rolling telemetry: per-expert blend weights for one gating layer plus
 * the style ramp position, over a bounded window of recent frames.
 *
 * The CSV export is a pass-through of received values: numbers are
 * written with their shortest round-trip decimal form, so parsing the
 * file recovers exactly the floats the server sent.
 */
import { Frame } from "./protocol";
import { RingBuffer } from "./ring";

export interface ChartSample {
  t: number;
  /** expert weights per gating layer, as received */
  experts: number[][];
  lambda: number;
}

export class ChartRecorder {
  readonly buffer: RingBuffer<ChartSample>;
  paused = false;
  /** which gating layer the chart and export show */
  layer = 0;

  constructor(capacity = 600) {
    this.buffer = new RingBuffer(capacity);
  }

  record(frame: Frame): void {
    if (this.paused) return;
    this.buffer.push({
      t: frame.t,
      experts: frame.experts,
      lambda: frame.lambda,
    });
  }

  visible(): ChartSample[] {
    return this.buffer.toArray();
  }

  clear(): void {
    this.buffer.clear();
  }

  layerCount(): number {
    const last = this.buffer.last();
    return last ? last.experts.length : 0;
  }

  /** Columns t, alpha_1..alpha_N (selected layer), lambda. */
  exportCsv(): string {
    const rows = this.visible();
    const width = rows.reduce(
      (m, s) => Math.max(m, (s.experts[this.layer] ?? []).length),
      0,
    );
    const header = ["t"];
    for (let i = 1; i <= width; i += 1) header.push(`alpha_${i}`);
    header.push("lambda");
    const lines = [header.join(",")];
    for (const s of rows) {
      const alphas = s.experts[this.layer] ?? [];
      const cells = [String(s.t)];
      for (let i = 0; i < width; i += 1) cells.push(String(alphas[i] ?? ""));
      cells.push(String(s.lambda));
      lines.push(cells.join(","));
    }
    return lines.join("\n") + "\n";
  }
}

/** Draw one series set onto a 2-D canvas. Kept free of chart state so the
 * recorder stays testable without a DOM. */
export function drawChart(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  series: { label: string; color: string; values: number[] }[],
  yMin: number,
  yMax: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#444";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  const span = yMax - yMin || 1;
  for (const s of series) {
    if (s.values.length < 2) continue;
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    const dx = width / (s.values.length - 1);
    s.values.forEach((v, i) => {
      const x = i * dx;
      const y = height - ((v - yMin) / span) * height;
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
  ctx.fillStyle = "#ccc";
  ctx.font = "11px sans-serif";
  series.forEach((s, i) => {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, 6, 14 + 13 * i);
  });
}
