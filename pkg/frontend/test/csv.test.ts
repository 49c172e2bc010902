import { describe, expect, it } from "vitest";
import fs from "node:fs";
import path from "node:path";

import { parseCsv, REQUIRED_COLUMNS, SchemaError } from "../src/csv.js";

const FIXTURES = path.join(__dirname, "fixtures");

function fixture(name: string): string {
  return fs.readFileSync(path.join(FIXTURES, name), "utf8");
}

function makeCsv(rows: Record<string, string | number>[]): string {
  const header = REQUIRED_COLUMNS.join(",");
  const body = rows.map((r) => REQUIRED_COLUMNS.map((c) => r[c] ?? 0).join(","));
  return ["# synthetic", header, ...body].join("\n");
}

export function syntheticRow(over: Record<string, string | number> = {}) {
  const base: Record<string, string | number> = {
    command: "sweep", sweep_axis: "P", D: 3, N: 10, L: 1, seed: 0,
    window: "bm", xi: 6.3, eps: 1e-8, M: 28, P: 8, shape: 20, s0: 1, s: 1,
    s0_eff: 1, s_eff: 1, nI: 3, R: 0, rc: 0.5, rms_vs_oracle: 1e-6,
    t_spread: 0.001, t_aft: 0.002, t_scale: 0.003, t_aift: 0.002,
    t_gather: 0.001, t_realspace: 0.004, t_precompute: 0, t_total: 0.013,
  };
  return { ...base, ...over };
}

describe("parseCsv", () => {
  it("skips the metadata preamble and types numeric columns", () => {
    const rows = parseCsv(fixture("beta_sweep.csv"));
    expect(rows.length).toBeGreaterThan(5);
    expect(typeof rows[0].shape).toBe("number");
    expect(rows[0].window).toBe("bm");
    expect(rows[0].D).toBe(3);
  });

  it("fails loudly on missing columns", () => {
    const text = "a,b,c\n1,2,3\n";
    expect(() => parseCsv(text)).toThrow(SchemaError);
    expect(() => parseCsv(text)).toThrow(/missing columns:.*rms_vs_oracle/);
  });

  it("fails on an empty body with 'no data rows'", () => {
    const text = "# meta\n" + REQUIRED_COLUMNS.join(",") + "\n";
    expect(() => parseCsv(text)).toThrow(/no data rows/);
  });

  it("fails on ragged rows", () => {
    const text = REQUIRED_COLUMNS.join(",") + "\n1,2,3\n";
    expect(() => parseCsv(text)).toThrow(/fields/);
  });

  it("round-trips synthetic records", () => {
    const rows = parseCsv(makeCsv([syntheticRow(), syntheticRow({ P: 10 })]));
    expect(rows.length).toBe(2);
    expect(rows[1].P).toBe(10);
  });
});
