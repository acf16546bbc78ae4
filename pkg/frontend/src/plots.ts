import { writeFileSync } from "node:fs";
import { CsvError, numericColumn, readCsv, type Row } from "./csv.js";
import { lineChart, type Series } from "./svg.js";

function groupByStation(rows: Row[], path: string): Map<number, Row[]> {
  const groups = new Map<number, Row[]>();
  for (const row of rows) {
    const x = row["x_station"];
    if (typeof x !== "number") throw new CsvError(`${path}: bad x_station`);
    if (!groups.has(x)) groups.set(x, []);
    groups.get(x)!.push(row);
  }
  return groups;
}

/** Decay curve: sqrt(t)*||u||_inf vs t, plus ||u||_inf on log-log axes. */
export function renderDecay(normsPath: string, outputPath: string): void {
  const rows = readCsv(normsPath, ["t", "linf_u", "sqrt_t_linf"]);
  const t = numericColumn(rows, normsPath, "t");
  const scaled = numericColumn(rows, normsPath, "sqrt_t_linf");
  const svg = lineChart(
    [{ x: t, y: scaled, label: "sqrt(t) sup|u|" }],
    {
      title: "Dispersive decay",
      xLabel: "t",
      yLabel: "sqrt(t) sup|u(t)|",
      xLog: true,
    },
  );
  writeFileSync(outputPath, svg);
}

/**
 * Phase residual (unwrapped phase minus t*phi) against log t, with the
 * fitted log-t slope from the scattering fit overlaid per station.
 */
export function renderPhase(
  profilePath: string,
  fitPath: string,
  outputPath: string,
): void {
  const profile = readCsv(profilePath, ["t", "x_station", "phase_residual"]);
  const fit = readCsv(fitPath, ["x_station", "phase_slope"]);
  const slopes = new Map<number, number>();
  for (const row of fit) {
    slopes.set(row["x_station"] as number, row["phase_slope"] as number);
  }
  const series: Series[] = [];
  for (const [station, rows] of groupByStation(profile, profilePath)) {
    const t = numericColumn(rows, profilePath, "t");
    const residual = numericColumn(rows, profilePath, "phase_residual");
    series.push({ x: t, y: residual, label: `x = ${station}` });
    const slope = slopes.get(station);
    if (slope !== undefined) {
      // fitted line slope*log(t) + c anchored at the last sample
      const tLast = t[t.length - 1]!;
      const c = residual[residual.length - 1]! - slope * Math.log(tLast);
      series.push({
        x: t,
        y: t.map((v) => slope * Math.log(v) + c),
        label: `fit slope ${slope.toExponential(2)}`,
        dashed: true,
      });
    }
  }
  const svg = lineChart(series, {
    title: "Modified-scattering phase twist",
    xLabel: "t (log scale)",
    yLabel: "phase - t phi(x)",
    xLog: true,
  });
  writeFileSync(outputPath, svg);
}

/** The Lagrangian manifold xi = -x / sqrt(1 - x^2) over |x| <= 0.99. */
export function renderLagrangian(outputPath: string): void {
  const x: number[] = [];
  const xi: number[] = [];
  const n = 400;
  for (let i = 0; i <= n; i++) {
    const v = -0.99 + (1.98 * i) / n;
    x.push(v);
    xi.push(-v / Math.sqrt(1 - v * v));
  }
  const svg = lineChart([{ x, y: xi, label: "xi = dphi(x)" }], {
    title: "Lagrangian manifold of the Klein-Gordon phase",
    xLabel: "x",
    yLabel: "xi",
  });
  writeFileSync(outputPath, svg);
}

/**
 * Profile vs PDE comparison: the modulus of the station samples over
 * time against the constant modulus of the limit profile (the mean over
 * the last decade of samples).
 */
export function renderProfileCompare(
  profilePath: string,
  outputPath: string,
): void {
  const profile = readCsv(profilePath, ["t", "x_station", "re", "im"]);
  const series: Series[] = [];
  for (const [station, rows] of groupByStation(profile, profilePath)) {
    const t = numericColumn(rows, profilePath, "t");
    const re = numericColumn(rows, profilePath, "re");
    const im = numericColumn(rows, profilePath, "im");
    const modulus = re.map((r, i) => Math.hypot(r, im[i]!));
    const tLast = t[t.length - 1]!;
    const window = t
      .map((v, i) => (v >= tLast / 10 ? modulus[i]! : NaN))
      .filter(Number.isFinite);
    const mean = window.reduce((a, b) => a + b, 0) / window.length;
    series.push({ x: t, y: modulus, label: `PDE |v|, x = ${station}` });
    series.push({
      x: [t[0]!, tLast],
      y: [mean, mean],
      label: `limit profile, x = ${station}`,
      dashed: true,
    });
  }
  const svg = lineChart(series, {
    title: "Station modulus vs constant limit profile",
    xLabel: "t",
    yLabel: "|v(t, x)|",
  });
  writeFileSync(outputPath, svg);
}
