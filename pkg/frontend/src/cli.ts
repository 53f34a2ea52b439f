#!/usr/bin/env node
/* plotkit: turn sweep CSVs from the mimobc harness into SVG figures.
 *
 *   plotkit --csv sweep.csv --kind rate_vs_snr --out fig.svg
 *   plotkit --csv trace.csv --kind convergence --out fig.svg
 *   plotkit --csv k1.csv --csv k100.csv --kind rician_k --out fig.svg
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { renderChart, ChartSpec } from "./charts.js";
import { convergence, rateVsSnr, ricianK } from "./kinds.js";

export const KINDS = ["rate_vs_snr", "convergence", "rician_k"] as const;
export type Kind = (typeof KINDS)[number];

export function buildFigure(
  kind: Kind,
  csvPaths: string[],
  algorithm: string,
): string {
  const files = csvPaths.map((p) => ({ path: p, text: readFileSync(p, "utf8") }));
  let spec: ChartSpec;
  if (kind === "rician_k") {
    spec = ricianK(files, algorithm);
  } else {
    if (files.length !== 1) {
      throw new Error(`--kind ${kind} takes exactly one --csv input`);
    }
    spec = kind === "rate_vs_snr" ? rateVsSnr(files[0].text) : convergence(files[0].text);
  }
  return renderChart(spec);
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .option("csv", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "input CSV (repeat for rician_k, one file per K factor)",
    })
    .option("kind", {
      choices: KINDS,
      demandOption: true,
      describe: "figure to draw",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("algorithm", {
      type: "string",
      default: "alg2",
      describe: "which algorithm's curve to show (rician_k only)",
    })
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parseSync();

  const svg = buildFigure(args.kind, args.csv, args.algorithm);
  writeFileSync(args.out, svg + "\n", "utf8");
  console.log(`wrote ${args.out}`);
  return 0;
}

const thisFile = new URL(import.meta.url).pathname;
if (process.argv[1] === thisFile) {
  try {
    process.exitCode = main(hideBin(process.argv));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exitCode = 1;
  }
}
