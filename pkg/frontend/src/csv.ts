/**
 * Strict parsing of the solver's CSV schemas.
 *
 * The emitter writes plain comma-separated values with 17-significant-digit
 * floats and no quoting, so a small hand-rolled parser keeps the dependency
 * surface empty while still validating headers and row shapes.
 */
import { readFileSync } from "node:fs";

export const SERIES_HEADER = [
  "t", "i", "X_i", "x_i", "f_i", "E1", "E2", "xi_left", "xi_right",
] as const;

export const WAITING_HEADER = [
  "m", "theta", "M", "tau", "case", "t_star_h", "t_star_exact",
] as const;

export interface SeriesRow {
  t: number;
  i: number;
  X: number;
  x: number;
  f: number;
  e1: number;
  e2: number;
  xiLeft: number;
  xiRight: number;
}

export interface WaitingRow {
  m: number;
  theta: number;
  M: number;
  tau: number;
  scheme: number;
  tStarDetected: number;
  tStarExact: number;
}

function splitRows(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.length > 0)
    .map((line) => line.split(","));
}

function checkHeader(got: string[], expected: readonly string[], path: string): void {
  if (got.length !== expected.length || expected.some((name, k) => got[k] !== name)) {
    throw new Error(
      `${path}: header [${got.join(",")}] does not match the expected schema [${expected.join(",")}]`,
    );
  }
}

function num(cell: string, where: string): number {
  const v = Number(cell);
  if (!Number.isFinite(v)) {
    throw new Error(`${where}: cannot parse numeric cell ${JSON.stringify(cell)}`);
  }
  return v;
}

/** Parse a simulation-series CSV; throws on schema mismatch or an empty body. */
export function readSeries(path: string): SeriesRow[] {
  const rows = splitRows(readFileSync(path, "utf-8"));
  if (rows.length === 0) throw new Error(`${path}: empty file`);
  checkHeader(rows[0], SERIES_HEADER, path);
  if (rows.length === 1) throw new Error(`${path}: no data rows`);
  return rows.slice(1).map((cells, k) => {
    if (cells.length !== SERIES_HEADER.length) {
      throw new Error(`${path}: row ${k + 2} has ${cells.length} cells`);
    }
    const at = `${path}:${k + 2}`;
    return {
      t: num(cells[0], at),
      i: num(cells[1], at),
      X: num(cells[2], at),
      x: num(cells[3], at),
      f: num(cells[4], at),
      e1: num(cells[5], at),
      e2: num(cells[6], at),
      xiLeft: num(cells[7], at),
      xiRight: num(cells[8], at),
    };
  });
}

/** Parse a waiting-time summary CSV. */
export function readWaiting(path: string): WaitingRow[] {
  const rows = splitRows(readFileSync(path, "utf-8"));
  if (rows.length === 0) throw new Error(`${path}: empty file`);
  checkHeader(rows[0], WAITING_HEADER, path);
  if (rows.length === 1) throw new Error(`${path}: no data rows`);
  return rows.slice(1).map((cells, k) => {
    const at = `${path}:${k + 2}`;
    return {
      m: num(cells[0], at),
      theta: num(cells[1], at),
      M: num(cells[2], at),
      tau: num(cells[3], at),
      scheme: num(cells[4], at),
      tStarDetected: num(cells[5], at),
      tStarExact: num(cells[6], at),
    };
  });
}

/** Distinct time levels present in a series, ascending. */
export function seriesTimes(rows: SeriesRow[]): number[] {
  return [...new Set(rows.map((r) => r.t))].sort((a, b) => a - b);
}

/** Rows of the level closest to the requested time; errors beyond tolerance. */
export function snapshotAt(rows: SeriesRow[], t: number): SeriesRow[] {
  const times = seriesTimes(rows);
  let best = times[0];
  for (const lvl of times) {
    if (Math.abs(lvl - t) < Math.abs(best - t)) best = lvl;
  }
  let gap = Infinity;
  for (let k = 1; k < times.length; k += 1) {
    gap = Math.min(gap, times[k] - times[k - 1]);
  }
  const tol = Number.isFinite(gap) ? 0.51 * gap : Math.max(1e-9, 1e-6 * Math.abs(best));
  if (Math.abs(best - t) > Math.max(tol, 1e-9)) {
    throw new Error(
      `requested snapshot time ${t} not present (closest level ${best}, available ${times.length})`,
    );
  }
  return rows.filter((r) => r.t === best).sort((a, b) => a.i - b.i);
}
