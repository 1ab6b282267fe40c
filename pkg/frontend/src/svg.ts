/**
 * Minimal deterministic SVG plotting: linear axes, polylines, markers, legend.
 *
 * Output is plain SVG text so figure regeneration is reproducible byte for
 * byte and needs no DOM or canvas binding.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
  dash?: string;
  markers?: boolean;
  width?: number;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

const MARGIN = { left: 64, right: 16, top: 34, bottom: 46 };

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) throw new Error("no finite data to plot");
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.04 * (hi - lo);
  return [lo - pad, hi + pad];
}

function ticks(lo: number, hi: number, n = 6): number[] {
  const rawStep = (hi - lo) / n;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const candidates = [1, 2, 2.5, 5, 10].map((c) => c * mag);
  const step = candidates.find((c) => (hi - lo) / c <= n) ?? candidates[candidates.length - 1];
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-12 * Math.abs(step); v += step) {
    out.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(6)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render a line plot to SVG text. */
export function renderPlot(spec: PlotSpec): string {
  const W = spec.width ?? 720;
  const H = spec.height ?? 480;
  const iw = W - MARGIN.left - MARGIN.right;
  const ih = H - MARGIN.top - MARGIN.bottom;
  const allX = spec.series.flatMap((s) => s.x);
  const allY = spec.series.flatMap((s) => s.y);
  if (allX.length === 0) throw new Error("no series data to plot");
  const [x0, x1] = extent(allX);
  const [y0, y1] = extent(allY);
  const sx = (v: number) => MARGIN.left + ((v - x0) / (x1 - x0)) * iw;
  const sy = (v: number) => MARGIN.top + ih - ((v - y0) / (y1 - y0)) * ih;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(
    `<text x="${W / 2}" y="20" text-anchor="middle" font-size="14">${esc(spec.title)}</text>`,
  );

  for (const tx of ticks(x0, x1)) {
    const px = sx(tx);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${MARGIN.top}" x2="${px.toFixed(2)}" y2="${MARGIN.top + ih}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px.toFixed(2)}" y="${MARGIN.top + ih + 18}" text-anchor="middle" font-size="11">${fmt(tx)}</text>`,
    );
  }
  for (const ty of ticks(y0, y1)) {
    const py = sy(ty);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py.toFixed(2)}" x2="${MARGIN.left + iw}" y2="${py.toFixed(2)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmt(ty)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${iw}" height="${ih}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + iw / 2}" y="${H - 8}" text-anchor="middle" font-size="12">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + ih / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${MARGIN.top + ih / 2})">${esc(spec.yLabel)}</text>`,
  );

  spec.series.forEach((s, idx) => {
    const color = s.color ?? PALETTE[idx % PALETTE.length];
    const pts = s.x.map((vx, k) => `${sx(vx).toFixed(2)},${sy(s.y[k]).toFixed(2)}`);
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="${s.width ?? 1.5}"${dash}/>`,
    );
    if (s.markers) {
      for (const p of pts) {
        const [mx, my] = p.split(",");
        parts.push(`<circle cx="${mx}" cy="${my}" r="2.5" fill="${color}"/>`);
      }
    }
  });

  const shown = spec.series.filter((s) => s.label.length > 0);
  shown.forEach((s, idx) => {
    const color = s.color ?? PALETTE[spec.series.indexOf(s) % PALETTE.length];
    const y = MARGIN.top + 14 + 16 * idx;
    const x = MARGIN.left + iw - 170;
    parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 24}" y2="${y - 4}" stroke="${color}" stroke-width="2"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`,
    );
    parts.push(`<text x="${x + 30}" y="${y}" font-size="11">${esc(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}
