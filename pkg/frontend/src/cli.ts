#!/usr/bin/env node
/** figures <figure-id> --in CSV [--in CSV ...] --out PATH */

import fs from "node:fs";

import { loadCsvFiles, SchemaError } from "./csv.js";
import { buildFigure, FIGURE_IDS, FigureId } from "./figures.js";
import { renderSvg } from "./svg.js";

export function parseArgs(argv: string[]): { id: FigureId; inputs: string[]; out: string } {
  if (argv.length === 0) {
    throw new UsageError(`usage: figures <${FIGURE_IDS.join("|")}> --in CSV [--in CSV ...] --out PATH`);
  }
  const id = argv[0] as FigureId;
  if (!FIGURE_IDS.includes(id)) {
    throw new UsageError(`unknown figure id '${argv[0]}'; expected one of ${FIGURE_IDS.join(", ")}`);
  }
  const inputs: string[] = [];
  let out = "";
  for (let i = 1; i < argv.length; i++) {
    if (argv[i] === "--in") {
      inputs.push(argv[++i]);
    } else if (argv[i] === "--out") {
      out = argv[++i];
    } else {
      throw new UsageError(`unknown flag ${argv[i]}`);
    }
  }
  if (inputs.length === 0 || !out) {
    throw new UsageError("need at least one --in CSV and an --out PATH");
  }
  return { id, inputs, out };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`figures: ${(e as Error).message}`);
    return 2;
  }
  try {
    const rows = loadCsvFiles(args.inputs);
    const fig = buildFigure(args.id, rows);
    fs.writeFileSync(args.out, renderSvg(fig));
    return 0;
  } catch (e) {
    if (e instanceof SchemaError) {
      console.error(`figures: schema error: ${e.message}`);
    } else {
      console.error(`figures: error: ${(e as Error).message}`);
    }
    return 1;
  }
}

const isMain = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
