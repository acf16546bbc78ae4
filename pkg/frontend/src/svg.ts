/**
 * Minimal deterministic SVG line-chart builder.  No DOM, no canvas:
 * charts are assembled as strings so the same inputs always produce
 * byte-identical files.
 */

export interface Series {
  x: number[];
  y: number[];
  label?: string;
  color?: string;
  dashed?: boolean;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  width?: number;
  height?: number;
}

const MARGIN = { top: 40, right: 24, bottom: 48, left: 64 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

function transform(values: number[], log: boolean, axis: string): number[] {
  if (!log) return values;
  if (values.some((v) => v <= 0)) {
    throw new Error(`log scale on ${axis} axis requires positive values`);
  }
  return values.map(Math.log10);
}

function extent(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

function ticks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const scaled = span / count / step;
  const nice = scaled >= 5 ? 5 * step : scaled >= 2 ? 2 * step : step;
  const out: number[] = [];
  for (let v = Math.ceil(lo / nice) * nice; v <= hi + 1e-12; v += nice) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(6)).toString();
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function lineChart(series: Series[], options: ChartOptions): string {
  if (series.length === 0) throw new Error("no series to plot");
  for (const s of series) {
    if (s.x.length !== s.y.length) throw new Error("series x/y length mismatch");
    if (s.x.length === 0) throw new Error("empty series");
  }
  const width = options.width ?? 640;
  const height = options.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const tx = series.map((s) => transform(s.x, options.xLog ?? false, "x"));
  const ty = series.map((s) => transform(s.y, options.yLog ?? false, "y"));
  const [xLo, xHi] = extent(tx.flat());
  const [yLo, yHi] = extent(ty.flat());
  const sx = (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">` +
      `${escapeXml(options.title)}</text>`,
  );

  const backLabel = (v: number, log: boolean) => fmt(log ? Math.pow(10, v) : v);
  for (const t of ticks(xLo, xHi)) {
    const px = sx(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${MARGIN.top}" x2="${px.toFixed(2)}" ` +
        `y2="${MARGIN.top + plotH}" stroke="#ddd"/>`,
      `<text x="${px.toFixed(2)}" y="${MARGIN.top + plotH + 16}" ` +
        `text-anchor="middle">${backLabel(t, options.xLog ?? false)}</text>`,
    );
  }
  for (const t of ticks(yLo, yHi)) {
    const py = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py.toFixed(2)}" x2="${MARGIN.left + plotW}" ` +
        `y2="${py.toFixed(2)}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${(py + 4).toFixed(2)}" ` +
        `text-anchor="end">${backLabel(t, options.yLog ?? false)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 10}" text-anchor="middle">` +
      `${escapeXml(options.xLabel)}</text>`,
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">` +
      `${escapeXml(options.yLabel)}</text>`,
  );

  series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length]!;
    const points = tx[i]!
      .map((v, j) => `${sx(v).toFixed(2)},${sy(ty[i]![j]!).toFixed(2)}`)
      .join(" ");
    const dash = s.dashed ? ` stroke-dasharray="6 4"` : "";
    parts.push(
      `<polyline points="${points}" fill="none" stroke="${color}" stroke-width="1.5"${dash}/>`,
    );
    if (s.label) {
      const lx = MARGIN.left + plotW - 8;
      const ly = MARGIN.top + 16 + 16 * i;
      parts.push(
        `<line x1="${lx - 40}" y1="${ly - 4}" x2="${lx - 24}" y2="${ly - 4}" ` +
          `stroke="${color}" stroke-width="1.5"${dash}/>`,
        `<text x="${lx - 20}" y="${ly}" text-anchor="start">${escapeXml(s.label)}</text>`,
      );
    }
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
