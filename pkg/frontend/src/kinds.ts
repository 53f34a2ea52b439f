/* Figure kinds: how sweep / trace tables become chart series. */

import { basename } from "node:path";
import {
  parseSweepCsv,
  parseTraceCsv,
  SchemaError,
  SweepTable,
} from "./schema.js";
import { ChartSpec, Series } from "./charts.js";

function byNumericX(points: { x: string }[]): void {
  points.sort((a, b) => Number(a.x) - Number(b.x));
}

/** One series per algorithm, sum rate against SNR, from a single sweep. */
export function rateVsSnr(csvText: string): ChartSpec {
  const table = parseSweepCsv(csvText);
  const order: string[] = [];
  const groups = new Map<string, Series>();
  for (const row of table.rows) {
    let s = groups.get(row.algorithm);
    if (s === undefined) {
      s = { label: row.algorithm, points: [] };
      groups.set(row.algorithm, s);
      order.push(row.algorithm);
    }
    s.points.push({ x: row.snrDb, y: row.sumRate });
  }
  const series = order.map((name) => groups.get(name)!);
  for (const s of series) byNumericX(s.points);
  return {
    kind: "rate_vs_snr",
    xLabel: "SNR (dB)",
    yLabel: "sum rate (b/s/Hz)",
    series,
  };
}

/** Objective per iteration from an optimizer trace dump. */
export function convergence(csvText: string): ChartSpec {
  const points = parseTraceCsv(csvText);
  const order: string[] = [];
  const groups = new Map<string, Series>();
  for (const p of points) {
    let s = groups.get(p.series);
    if (s === undefined) {
      s = { label: p.series, points: [] };
      groups.set(p.series, s);
      order.push(p.series);
    }
    s.points.push({ x: p.iteration, y: p.objective });
  }
  const series = order.map((name) => groups.get(name)!);
  for (const s of series) byNumericX(s.points);
  return {
    kind: "convergence",
    xLabel: "iteration",
    yLabel: "objective (b/s/Hz)",
    series,
  };
}

/* Rician K-factor comparisons span several runs: the sweep schema has no K
 * column, so each input file is one K setting and becomes one series.  The
 * label comes from the file name (k10.csv -> "k10") and the curve shows a
 * single algorithm, alg2 unless told otherwise.
 */
export function ricianK(
  files: { path: string; text: string }[],
  algorithm: string,
): ChartSpec {
  const series: Series[] = [];
  for (const f of files) {
    let table: SweepTable;
    try {
      table = parseSweepCsv(f.text);
    } catch (err) {
      if (err instanceof SchemaError) {
        throw new SchemaError(`${f.path}: ${err.message}`);
      }
      throw err;
    }
    const points = table.rows
      .filter((row) => row.algorithm === algorithm)
      .map((row) => ({ x: row.snrDb, y: row.sumRate }));
    if (points.length === 0) {
      const seen = [...new Set(table.rows.map((r) => r.algorithm))];
      throw new SchemaError(
        `${f.path}: no "${algorithm}" rows (found: ${seen.join(", ")})`,
      );
    }
    byNumericX(points);
    series.push({ label: basename(f.path).replace(/\.csv$/i, ""), points });
  }
  return {
    kind: "rician_k",
    xLabel: "SNR (dB)",
    yLabel: `${algorithm} sum rate (b/s/Hz)`,
    series,
  };
}
