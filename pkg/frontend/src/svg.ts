/** Minimal SVG renderer: log/linear axes, polylines, markers, legend. */

import { FigureData, Point, Series } from "./figures.js";

const WIDTH = 640;
const HEIGHT = 480;
const MARGIN = { left: 70, right: 170, top: 30, bottom: 50 };

const COLORS = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
  "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#aec7e8", "#ff9896",
];

interface Scale {
  (v: number): number;
  ticks: number[];
}

function makeScale(lo: number, hi: number, rangeLo: number, rangeHi: number,
                   log: boolean): Scale {
  if (log) {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    const f = (v: number) =>
      rangeLo + ((Math.log10(v) - llo) / (lhi - llo || 1)) * (rangeHi - rangeLo);
    const ticks: number[] = [];
    for (let e = Math.ceil(llo); e <= Math.floor(lhi); e++) ticks.push(10 ** e);
    if (ticks.length === 0) ticks.push(lo, hi);
    return Object.assign(f, { ticks });
  }
  const f = (v: number) => rangeLo + ((v - lo) / (hi - lo || 1)) * (rangeHi - rangeLo);
  const n = 6;
  const step = (hi - lo) / n || 1;
  const ticks = Array.from({ length: n + 1 }, (_, i) => lo + i * step);
  return Object.assign(f, { ticks });
}

function extent(points: Point[], pick: (p: Point) => number, log: boolean): [number, number] {
  const vals = points.map(pick).filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (vals.length === 0) throw new Error("no finite values to plot");
  let lo = Math.min(...vals);
  let hi = Math.max(...vals);
  if (lo === hi) {
    lo = log ? lo / 10 : lo - 1;
    hi = log ? hi * 10 : hi + 1;
  }
  return [lo, hi];
}

function fmtTick(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  return Math.abs(v) >= 1000 || (Math.abs(v) < 0.01 && v !== 0)
    ? v.toExponential(1)
    : String(Math.round(v * 100) / 100);
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(fig: FigureData): string {
  const all = fig.series.flatMap((s) => s.points);
  const [xlo, xhi] = extent(all, (p) => p.x, fig.xLog);
  const [ylo, yhi] = extent(all, (p) => p.y, fig.yLog);
  const sx = makeScale(xlo, xhi, MARGIN.left, WIDTH - MARGIN.right, fig.xLog);
  const sy = makeScale(ylo, yhi, HEIGHT - MARGIN.bottom, MARGIN.top, fig.yLog);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // axes
  const x0 = MARGIN.left, x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom, y1 = MARGIN.top;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  for (const t of sx.ticks) {
    if (t < xlo * 0.999 || t > xhi * 1.001) continue;
    const px = sx(t);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(`<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmtTick(t, fig.xLog)}</text>`);
  }
  for (const t of sy.ticks) {
    const py = sy(t);
    parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`);
    parts.push(`<text x="${x0 - 8}" y="${py + 4}" text-anchor="end">${fmtTick(t, fig.yLog)}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle">${esc(fig.xLabel)}</text>`);
  parts.push(`<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
             `transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(fig.yLabel)}</text>`);

  fig.series.forEach((s: Series, i: number) => {
    const color = COLORS[i % COLORS.length];
    const pts = s.points
      .filter((p) => Number.isFinite(p.x) && Number.isFinite(p.y) && (!fig.yLog || p.y > 0))
      .map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
      .join(" ");
    const dash = s.overlay ? ' stroke-dasharray="5,4"' : "";
    parts.push(`<polyline points="${pts}" fill="none" stroke="${color}"${dash} data-series="${esc(s.label)}"/>`);
    for (const m of s.markers ?? []) {
      parts.push(`<circle cx="${sx(m.x).toFixed(2)}" cy="${sy(m.y).toFixed(2)}" r="4" ` +
                 `fill="${color}" data-marker="${esc(s.label)}"/>`);
    }
    const ly = MARGIN.top + 16 * i;
    parts.push(`<line x1="${x1 + 8}" y1="${ly}" x2="${x1 + 28}" y2="${ly}" stroke="${color}"${dash}/>`);
    parts.push(`<text x="${x1 + 33}" y="${ly + 4}">${esc(s.label)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}
