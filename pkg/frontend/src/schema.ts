/* Harness CSV contract.
 *
 * The experiment runner writes one row per (SNR point, algorithm):
 *
 *   snr_db, algorithm, sum_rate, rate_user1..rate_userL, mc_stderr,
 *   samples_used, wall_seconds, seed
 *
 * Cell text is preserved verbatim here: charts embed the original strings so
 * a rendered figure can be traced back to the exact CSV values.
 */

import Papa from "papaparse";

export const LEADING_COLUMNS = ["snr_db", "algorithm", "sum_rate"] as const;
export const TRAILING_COLUMNS = [
  "mc_stderr",
  "samples_used",
  "wall_seconds",
  "seed",
] as const;

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface SweepRow {
  snrDb: string;
  algorithm: string;
  sumRate: string;
  rateUsers: string[];
  mcStderr: string;
  samplesUsed: string;
  wallSeconds: string;
  seed: string;
}

export interface SweepTable {
  nUsers: number;
  rows: SweepRow[];
}

function splitCsv(text: string): string[][] {
  const parsed = Papa.parse<string[]>(text.trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`CSV parse error at row ${e.row}: ${e.message}`);
  }
  return parsed.data;
}

/** Validate the header and return the number of rate_user columns. */
function checkHeader(header: string[]): number {
  const missing: string[] = [];
  for (let i = 0; i < LEADING_COLUMNS.length; i++) {
    if (header[i] !== LEADING_COLUMNS[i]) missing.push(LEADING_COLUMNS[i]);
  }
  let nUsers = 0;
  while (header[LEADING_COLUMNS.length + nUsers] === `rate_user${nUsers + 1}`) {
    nUsers++;
  }
  if (nUsers === 0) missing.push("rate_user1");
  const tailStart = LEADING_COLUMNS.length + nUsers;
  for (let i = 0; i < TRAILING_COLUMNS.length; i++) {
    if (header[tailStart + i] !== TRAILING_COLUMNS[i]) {
      missing.push(TRAILING_COLUMNS[i]);
    }
  }
  if (missing.length > 0) {
    throw new SchemaError(
      `CSV does not match the sweep schema; missing or misplaced columns: ${missing.join(", ")}`,
    );
  }
  const expected = tailStart + TRAILING_COLUMNS.length;
  if (header.length !== expected) {
    throw new SchemaError(
      `unexpected trailing columns: ${header.slice(expected).join(", ")}`,
    );
  }
  return nUsers;
}

export function parseSweepCsv(text: string): SweepTable {
  const records = splitCsv(text);
  if (records.length === 0) {
    throw new SchemaError("CSV is empty");
  }
  const nUsers = checkHeader(records[0]);
  const width = LEADING_COLUMNS.length + nUsers + TRAILING_COLUMNS.length;
  if (records.length === 1) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  const rows: SweepRow[] = [];
  for (let r = 1; r < records.length; r++) {
    const cells = records[r];
    if (cells.length !== width) {
      throw new SchemaError(
        `row ${r + 1} has ${cells.length} fields, expected ${width}`,
      );
    }
    rows.push({
      snrDb: cells[0],
      algorithm: cells[1],
      sumRate: cells[2],
      rateUsers: cells.slice(3, 3 + nUsers),
      mcStderr: cells[3 + nUsers],
      samplesUsed: cells[4 + nUsers],
      wallSeconds: cells[5 + nUsers],
      seed: cells[6 + nUsers],
    });
  }
  return { nUsers, rows };
}

/* Convergence traces are a separate, simpler contract: the optimizer's
 * objective per iteration, optionally tagged with a run label.
 *
 *   iteration, objective[, series]
 */

export interface TracePoint {
  iteration: string;
  objective: string;
  series: string;
}

export function parseTraceCsv(text: string): TracePoint[] {
  const records = splitCsv(text);
  if (records.length === 0) {
    throw new SchemaError("CSV is empty");
  }
  const header = records[0];
  if (header[0] !== "iteration" || header[1] !== "objective") {
    const missing = [];
    if (header[0] !== "iteration") missing.push("iteration");
    if (header[1] !== "objective") missing.push("objective");
    throw new SchemaError(
      `CSV does not match the trace schema; missing or misplaced columns: ${missing.join(", ")}`,
    );
  }
  const hasSeries = header[2] === "series";
  const width = hasSeries ? 3 : 2;
  if (header.length !== width) {
    throw new SchemaError(
      `unexpected trailing columns: ${header.slice(width).join(", ")}`,
    );
  }
  if (records.length === 1) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  const points: TracePoint[] = [];
  for (let r = 1; r < records.length; r++) {
    const cells = records[r];
    if (cells.length !== width) {
      throw new SchemaError(
        `row ${r + 1} has ${cells.length} fields, expected ${width}`,
      );
    }
    points.push({
      iteration: cells[0],
      objective: cells[1],
      series: hasSeries ? cells[2] : "objective",
    });
  }
  return points;
}
