/** Series construction for the four figure kinds. */

import { RunRecord } from "./csv.js";

export type FigureId = "beta-sweep" | "p-sweep" | "stage-times" | "total-times";

export const FIGURE_IDS: FigureId[] = [
  "beta-sweep", "p-sweep", "stage-times", "total-times",
];

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
  /** dashed overlay (analytic estimate) rather than measured data */
  overlay?: boolean;
  /** marker positions (e.g. per-series error minima) */
  markers?: Point[];
}

export interface FigureData {
  id: FigureId;
  xLabel: string;
  yLabel: string;
  xLog: boolean;
  yLog: boolean;
  series: Series[];
}

function erfc(x: number): number {
  // Abramowitz-Stegun 7.1.26 (plotting accuracy)
  const sign = x < 0 ? -1 : 1;
  const ax = Math.abs(x);
  const t = 1 / (1 + 0.3275911 * ax);
  const y =
    t *
    (0.254829592 +
      t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429)))) *
    Math.exp(-ax * ax);
  return sign < 0 ? 2 - y : y;
}

export function bmEstimate(P: number, beta: number): number {
  return beta * beta * Math.exp((-2 * Math.PI * P * P) / beta) + erfc(Math.sqrt(beta));
}

function groupBy<T>(rows: T[], key: (r: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const r of rows) {
    const k = key(r);
    const bucket = out.get(k);
    if (bucket) bucket.push(r);
    else out.set(k, [r]);
  }
  return out;
}

function sortedBy<T>(rows: T[], key: (r: T) => number): T[] {
  return [...rows].sort((a, b) => key(a) - key(b));
}

function finiteRms(rows: RunRecord[]): RunRecord[] {
  return rows.filter((r) => Number.isFinite(r.rms_vs_oracle) && r.rms_vs_oracle > 0);
}

function argminPoint(points: Point[]): Point {
  let best = points[0];
  for (const p of points) if (p.y < best.y) best = p;
  return best;
}

export function betaSweep(rows: RunRecord[]): FigureData {
  const usable = finiteRms(rows.filter((r) => r.sweep_axis === "beta" || r.shape > 0));
  if (usable.length === 0) throw new Error("no usable beta-sweep rows (rms_vs_oracle required)");
  const series: Series[] = [];
  for (const [label, group] of groupBy(usable, (r) => `P=${r.P}`)) {
    const pts = sortedBy(group, (r) => r.shape).map((r) => ({ x: r.shape, y: r.rms_vs_oracle }));
    series.push({ label, points: pts, markers: [argminPoint(pts)] });
    // estimate overlay, scaled to touch the measured minimum
    const P = group[0].P;
    const est = pts.map((p) => ({ x: p.x, y: bmEstimate(P, p.x) }));
    const measuredMin = argminPoint(pts);
    const estAtMin = bmEstimate(P, measuredMin.x);
    if (estAtMin > 0) {
      const c = measuredMin.y / estAtMin;
      series.push({
        label: `${label} estimate`,
        points: est.map((p) => ({ x: p.x, y: c * p.y })),
        overlay: true,
      });
    }
  }
  return { id: "beta-sweep", xLabel: "beta", yLabel: "relative rms error",
           xLog: false, yLog: true, series };
}

export function pSweep(rows: RunRecord[]): FigureData {
  const usable = finiteRms(rows);
  if (usable.length === 0) throw new Error("no usable p-sweep rows (rms_vs_oracle required)");
  const series: Series[] = [];
  for (const [label, group] of groupBy(usable, (r) => `${r.window}, D=${r.D}`)) {
    series.push({
      label,
      points: sortedBy(group, (r) => r.P).map((r) => ({ x: r.P, y: r.rms_vs_oracle })),
    });
  }
  return { id: "p-sweep", xLabel: "window support P", yLabel: "relative rms error",
           xLog: false, yLog: true, series };
}

export function stageTimes(rows: RunRecord[]): FigureData {
  const usable = finiteRms(rows);
  if (usable.length === 0) throw new Error("no usable stage-times rows");
  const series: Series[] = [];
  for (const [key, group] of groupBy(usable, (r) => `${r.window}, D=${r.D}`)) {
    const byErr = sortedBy(group, (r) => r.rms_vs_oracle);
    series.push({
      label: `${key} fft+scale`,
      points: byErr.map((r) => ({ x: r.rms_vs_oracle, y: r.t_aft + r.t_scale + r.t_aift })),
    });
    series.push({
      label: `${key} spread+gather`,
      overlay: true,
      points: byErr.map((r) => ({ x: r.rms_vs_oracle, y: r.t_spread + r.t_gather })),
    });
  }
  return { id: "stage-times", xLabel: "relative rms error", yLabel: "stage time [s]",
           xLog: true, yLog: true, series };
}

export function totalTimes(rows: RunRecord[]): FigureData {
  const usable = finiteRms(rows);
  if (usable.length === 0) throw new Error("no usable total-times rows");
  const series: Series[] = [];
  for (const [label, group] of groupBy(usable, (r) => `${r.window}, D=${r.D}`)) {
    series.push({
      label,
      points: sortedBy(group, (r) => r.rms_vs_oracle)
        .map((r) => ({ x: r.rms_vs_oracle, y: r.t_total })),
    });
  }
  return { id: "total-times", xLabel: "relative rms error", yLabel: "total time [s]",
           xLog: true, yLog: true, series };
}

export function buildFigure(id: FigureId, rows: RunRecord[]): FigureData {
  switch (id) {
    case "beta-sweep":
      return betaSweep(rows);
    case "p-sweep":
      return pSweep(rows);
    case "stage-times":
      return stageTimes(rows);
    case "total-times":
      return totalTimes(rows);
  }
}
