import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { parseSweepCsv, parseTraceCsv, SchemaError } from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");
const sweepText = readFileSync(join(FIXTURES, "sweep.csv"), "utf8");

describe("parseSweepCsv", () => {
  it("reads the sweep fixture and keeps cell text verbatim", () => {
    const table = parseSweepCsv(sweepText);
    expect(table.nUsers).toBe(2);
    expect(table.rows.length).toBe(36);
    const first = table.rows[0];
    expect(first.snrDb).toBe("-10");
    expect(first.algorithm).toBe("alg1");
    // exact strings, not round-tripped numbers
    expect(first.sumRate).toBe("0.459905229");
    expect(first.rateUsers).toEqual(["0.249960305", "0.209944924"]);
    expect(first.samplesUsed).toBe("500");
    expect(first.seed).toBe("101");
  });

  it("accepts any user count implied by the rate columns", () => {
    const text =
      "snr_db,algorithm,sum_rate,rate_user1,rate_user2,rate_user3,mc_stderr,samples_used,wall_seconds,seed\n" +
      "0,alg2,3,1,1,1,0,100,0.1,1\n";
    const table = parseSweepCsv(text);
    expect(table.nUsers).toBe(3);
    expect(table.rows[0].rateUsers).toEqual(["1", "1", "1"]);
  });

  it("names the missing columns on a header mismatch", () => {
    const text = "snr_db,algorithm,sum_rate,rate_user1,mc_stderr\n0,a,1,1,0\n";
    expect(() => parseSweepCsv(text)).toThrow(SchemaError);
    expect(() => parseSweepCsv(text)).toThrow(
      /missing or misplaced columns: samples_used, wall_seconds, seed/,
    );
  });

  it("rejects a header with no rate_user1", () => {
    const text = "snr_db,algorithm,sum_rate,mc_stderr,samples_used,wall_seconds,seed\n";
    expect(() => parseSweepCsv(text)).toThrow(/rate_user1/);
  });

  it("rejects an unrelated header outright", () => {
    expect(() => parseSweepCsv("a,b,c\n1,2,3\n")).toThrow(SchemaError);
  });

  it("rejects a header with no data rows", () => {
    const header = sweepText.split("\n")[0];
    expect(() => parseSweepCsv(header + "\n")).toThrow(/no data rows/);
  });

  it("rejects an entirely empty file", () => {
    expect(() => parseSweepCsv("")).toThrow(/empty/);
  });

  it("rejects ragged rows with the row number", () => {
    const bad =
      "snr_db,algorithm,sum_rate,rate_user1,rate_user2,mc_stderr,samples_used,wall_seconds,seed\n" +
      "0,alg2,1.5,0.7\n" +
      "0,tdma,1.2,0.6,0.6,0.01,100,0.1,1\n";
    expect(() => parseSweepCsv(bad)).toThrow(/row 2 has 4 fields, expected 9/);
  });

  it("rejects extra trailing columns", () => {
    const text =
      "snr_db,algorithm,sum_rate,rate_user1,mc_stderr,samples_used,wall_seconds,seed,extra\n" +
      "0,a,1,1,0,10,0.1,1,9\n";
    expect(() => parseSweepCsv(text)).toThrow(/unexpected trailing columns: extra/);
  });
});

describe("parseTraceCsv", () => {
  it("reads the trace fixture with per-run labels", () => {
    const text = readFileSync(join(FIXTURES, "trace.csv"), "utf8");
    const points = parseTraceCsv(text);
    expect(points.length).toBe(43);
    expect(points[0]).toEqual({
      iteration: "0",
      objective: "6.90916067",
      series: "start0",
    });
    const labels = new Set(points.map((p) => p.series));
    expect([...labels].sort()).toEqual(["start0", "start1"]);
  });

  it("defaults the series label when the column is absent", () => {
    const points = parseTraceCsv("iteration,objective\n0,1.5\n1,2.0\n");
    expect(points.map((p) => p.series)).toEqual(["objective", "objective"]);
  });

  it("names missing trace columns", () => {
    expect(() => parseTraceCsv("step,value\n0,1\n")).toThrow(
      /missing or misplaced columns: iteration, objective/,
    );
  });

  it("rejects a trace with no data rows", () => {
    expect(() => parseTraceCsv("iteration,objective\n")).toThrow(/no data rows/);
  });
});
