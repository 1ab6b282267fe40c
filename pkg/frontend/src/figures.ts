/**
 * The four figure kinds rebuilt from solver CSV output.
 *
 * Rendering is strictly read-only over the CSV inputs; a figure is written
 * only after its data validates, so a bad input never leaves a file behind.
 */
import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { readSeries, readWaiting, seriesTimes, snapshotAt, SeriesRow } from "./csv.js";
import { barenblatt, barenblattInterface, exactWaitingTime } from "./exact.js";
import { renderPlot, Series } from "./svg.js";

export type FigureKind =
  | "density_snapshots"
  | "trajectories"
  | "interfaces"
  | "waiting_comparison";

export interface OracleSpec {
  kind: "barenblatt";
  m: number;
}

export interface FigureSpec {
  kind: FigureKind;
  /** Input CSV paths (series CSVs, or a waiting summary for the comparison plot). */
  inputs: string[];
  /** Snapshot times for density plots; ignored by the other kinds. */
  times?: number[];
  /** Output SVG path. */
  output: string;
  /** Optional closed-form overlay. */
  oracle?: OracleSpec;
  /** Every k-th particle in the trajectory fan (default chooses ~40 curves). */
  particleStride?: number;
  title?: string;
}

export function validateSpec(raw: unknown): FigureSpec {
  const spec = raw as Partial<FigureSpec>;
  const kinds: FigureKind[] = [
    "density_snapshots",
    "trajectories",
    "interfaces",
    "waiting_comparison",
  ];
  if (!spec || typeof spec !== "object") throw new Error("figure spec must be an object");
  if (!spec.kind || !kinds.includes(spec.kind)) {
    throw new Error(`kind must be one of ${kinds.join(", ")}`);
  }
  if (!Array.isArray(spec.inputs) || spec.inputs.length === 0) {
    throw new Error("inputs must list at least one CSV path");
  }
  if (typeof spec.output !== "string" || spec.output.length === 0) {
    throw new Error("output path required");
  }
  if (spec.kind === "density_snapshots" && (!Array.isArray(spec.times) || spec.times.length === 0)) {
    throw new Error("density_snapshots needs snapshot times");
  }
  if (spec.oracle && spec.oracle.kind !== "barenblatt") {
    throw new Error("only the barenblatt oracle overlay is supported");
  }
  return spec as FigureSpec;
}

function overlayCurve(lo: number, hi: number, t: number, m: number): Series {
  const n = 600;
  const x: number[] = [];
  const y: number[] = [];
  for (let k = 0; k <= n; k += 1) {
    const v = lo + ((hi - lo) * k) / n;
    x.push(v);
    y.push(barenblatt(v, t, m));
  }
  return { label: `exact t=${t}`, x, y, dash: "5 3", color: "#333333", width: 1.2 };
}

function densityFigure(spec: FigureSpec): string {
  const rows = readSeries(spec.inputs[0]);
  const series: Series[] = [];
  const times = spec.times ?? [];
  for (const t of times) {
    const snap = snapshotAt(rows, t);
    series.push({ label: `computed t=${t}`, x: snap.map((r) => r.x), y: snap.map((r) => r.f) });
  }
  if (spec.oracle) {
    const lo = Math.min(...series.flatMap((s) => s.x));
    const hi = Math.max(...series.flatMap((s) => s.x));
    for (const t of times) {
      series.push(overlayCurve(lo, hi, t, spec.oracle.m));
    }
  }
  return renderPlot({
    title: spec.title ?? "density evolution",
    xLabel: "x",
    yLabel: "f",
    series,
  });
}

function trajectoryFigure(spec: FigureSpec): string {
  const rows = readSeries(spec.inputs[0]);
  const times = seriesTimes(rows);
  if (times.length < 2) throw new Error("trajectory fan needs at least two time levels");
  const byTime = new Map<number, SeriesRow[]>();
  for (const t of times) byTime.set(t, []);
  for (const r of rows) byTime.get(r.t)!.push(r);
  for (const t of times) byTime.get(t)!.sort((a, b) => a.i - b.i);
  const nodes = byTime.get(times[0])!.length;
  const stride = spec.particleStride ?? Math.max(1, Math.floor(nodes / 40));
  const series: Series[] = [];
  for (let i = 0; i < nodes; i += stride) {
    const x: number[] = [];
    const y: number[] = [];
    for (const t of times) {
      const level = byTime.get(t)!;
      if (level.length !== nodes) {
        throw new Error("trajectory fan needs a fixed particle count across levels");
      }
      x.push(level[i].x);
      y.push(t);
    }
    series.push({ label: "", x, y, color: "#1f77b4", width: 0.8 });
  }
  return renderPlot({
    title: spec.title ?? "particle trajectories",
    xLabel: "x",
    yLabel: "t",
    series,
  });
}

function interfaceFigure(spec: FigureSpec): string {
  const series: Series[] = [];
  spec.inputs.forEach((path, idx) => {
    const rows = readSeries(path);
    const times = seriesTimes(rows);
    const right: number[] = [];
    const left: number[] = [];
    for (const t of times) {
      const any = rows.find((r) => r.t === t)!;
      right.push(any.xiRight);
      left.push(any.xiLeft);
    }
    const tag = spec.inputs.length > 1 ? ` [${idx + 1}]` : "";
    series.push({ label: `right interface${tag}`, x: times, y: right });
    series.push({ label: `left interface${tag}`, x: times, y: left });
  });
  if (spec.oracle) {
    const rows = readSeries(spec.inputs[0]);
    const times = seriesTimes(rows);
    series.push({
      label: "exact",
      x: times,
      y: times.map((t) => barenblattInterface(t, spec.oracle!.m)),
      dash: "5 3",
      color: "#333333",
    });
    series.push({
      label: "",
      x: times,
      y: times.map((t) => -barenblattInterface(t, spec.oracle!.m)),
      dash: "5 3",
      color: "#333333",
    });
  }
  return renderPlot({
    title: spec.title ?? "interface positions",
    xLabel: "t",
    yLabel: "x",
    series,
  });
}

function waitingFigure(spec: FigureSpec): string {
  const rows = readWaiting(spec.inputs[0]);
  const sorted = [...rows].sort((a, b) => a.theta - b.theta);
  const m = sorted[0].m;
  const thetas: number[] = [];
  const exact: number[] = [];
  const n = 200;
  for (let k = 0; k <= n; k += 1) {
    const th = (0.25 * k) / n;
    thetas.push(th);
    exact.push(exactWaitingTime(m, th));
  }
  return renderPlot({
    title: spec.title ?? "waiting time: detected vs exact",
    xLabel: "theta",
    yLabel: "t*",
    series: [
      {
        label: "detected",
        x: sorted.map((r) => r.theta),
        y: sorted.map((r) => r.tStarDetected),
        markers: true,
      },
      { label: "exact", x: thetas, y: exact, dash: "5 3", color: "#333333" },
    ],
  });
}

/** Render one figure; returns the SVG text after writing it. */
export function render(spec: FigureSpec): string {
  validateSpec(spec);
  let svg: string;
  switch (spec.kind) {
    case "density_snapshots":
      svg = densityFigure(spec);
      break;
    case "trajectories":
      svg = trajectoryFigure(spec);
      break;
    case "interfaces":
      svg = interfaceFigure(spec);
      break;
    case "waiting_comparison":
      svg = waitingFigure(spec);
      break;
  }
  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg, "utf-8");
  return svg;
}
