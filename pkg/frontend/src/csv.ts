/** Parsing and validation of pmewald RunRecord CSV files. */

import fs from "node:fs";

export interface RunRecord {
  command: string;
  sweep_axis: string;
  D: number;
  N: number;
  L: number;
  seed: number;
  window: string;
  xi: number;
  eps: number;
  M: number;
  P: number;
  shape: number;
  s0: number;
  s: number;
  s0_eff: number;
  s_eff: number;
  nI: number;
  R: number;
  rc: number;
  rms_vs_oracle: number;
  t_spread: number;
  t_aft: number;
  t_scale: number;
  t_aift: number;
  t_gather: number;
  t_realspace: number;
  t_precompute: number;
  t_total: number;
}

export const NUMERIC_COLUMNS: (keyof RunRecord)[] = [
  "D", "N", "L", "seed", "xi", "eps", "M", "P", "shape", "s0", "s",
  "s0_eff", "s_eff", "nI", "R", "rc", "rms_vs_oracle", "t_spread", "t_aft",
  "t_scale", "t_aift", "t_gather", "t_realspace", "t_precompute", "t_total",
];

export const REQUIRED_COLUMNS: string[] = [
  "command", "sweep_axis", "window", ...NUMERIC_COLUMNS,
];

export class SchemaError extends Error {}

/** Parse one CSV document: '#' lines are metadata, first real line the header. */
export function parseCsv(text: string): RunRecord[] {
  const lines = text
    .split(/\r?\n/)
    .filter((l) => l.trim() !== "" && !l.startsWith("#"));
  if (lines.length === 0) {
    throw new SchemaError("no header row");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const missing = REQUIRED_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`missing columns: ${missing.join(", ")}`);
  }
  const body = lines.slice(1);
  if (body.length === 0) {
    throw new SchemaError("no data rows");
  }
  return body.map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(`row ${i + 1} has ${parts.length} fields, expected ${header.length}`);
    }
    const raw: Record<string, string> = {};
    header.forEach((h, j) => (raw[h] = parts[j]));
    const rec: Record<string, string | number> = {};
    for (const col of header) {
      if ((NUMERIC_COLUMNS as string[]).includes(col)) {
        const v = Number(raw[col]);
        rec[col] = Number.isNaN(v) && raw[col] !== "nan" ? NaN : v;
      } else {
        rec[col] = raw[col];
      }
    }
    return rec as unknown as RunRecord;
  });
}

export function loadCsvFiles(paths: string[]): RunRecord[] {
  const all: RunRecord[] = [];
  for (const p of paths) {
    all.push(...parseCsv(fs.readFileSync(p, "utf8")));
  }
  return all;
}
