/* Minimal SVG line charts.
 *
 * No DOM, no drawing library: the output is assembled as text so it renders
 * anywhere and stays easy to diff.  Every polyline carries two machine
 * readable attributes:
 *
 *   data-series  the series label
 *   data-points  "x,y;x,y;..." built from the ORIGINAL csv cell strings
 *
 * Numbers are only parsed for pixel placement; the data attributes are the
 * source values byte for byte.
 */

export interface SeriesPoint {
  x: string;
  y: string;
}

export interface Series {
  label: string;
  points: SeriesPoint[];
}

export interface ChartSpec {
  kind: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 24, right: 24, bottom: 52, left: 64 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&apos;");
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === hi) {
    // degenerate span; open up a unit window so the scale stays invertible
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function linearScale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const k = (r1 - r0) / (d1 - d0);
  return (v: number) => r0 + (v - d0) * k;
}

/** Round tick positions covering the domain, roughly `n` of them. */
function ticks(domain: [number, number], n: number): number[] {
  const span = domain[1] - domain[0];
  const raw = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  const first = Math.ceil(domain[0] / step) * step;
  for (let v = first; v <= domain[1] + 1e-9; v += step) {
    out.push(Math.abs(v) < 1e-12 ? 0 : v);
  }
  return out;
}

function fmtTick(v: number): string {
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function renderChart(spec: ChartSpec): string {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of spec.series) {
    for (const p of s.points) {
      const x = Number(p.x);
      const y = Number(p.y);
      if (!Number.isFinite(x) || !Number.isFinite(y)) {
        throw new Error(
          `series "${s.label}" has a non numeric point (${p.x}, ${p.y})`,
        );
      }
      xs.push(x);
      ys.push(y);
    }
  }
  if (xs.length === 0) {
    throw new Error("nothing to plot: every series is empty");
  }

  const xDomain = extent(xs);
  const yDomain = extent(ys);
  const xScale = linearScale(xDomain, [MARGIN.left, WIDTH - MARGIN.right]);
  const yScale = linearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12" ` +
      `data-kind="${escapeXml(spec.kind)}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // axes
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
  );
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
  );

  for (const t of ticks(xDomain, 8)) {
    const px = xScale(t).toFixed(2);
    parts.push(
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`,
    );
    parts.push(
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of ticks(yDomain, 6)) {
    const py = yScale(t).toFixed(2);
    parts.push(
      `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`,
    );
    parts.push(
      `<text x="${x0 - 8}" y="${py}" dy="4" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle">` +
      `${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  // series
  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const px = s.points
      .map((p) => `${xScale(Number(p.x)).toFixed(2)},${yScale(Number(p.y)).toFixed(2)}`)
      .join(" ");
    const data = s.points.map((p) => `${p.x},${p.y}`).join(";");
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${px}" ` +
        `data-series="${escapeXml(s.label)}" data-points="${escapeXml(data)}"/>`,
    );
    for (const p of s.points) {
      const cx = xScale(Number(p.x)).toFixed(2);
      const cy = yScale(Number(p.y)).toFixed(2);
      parts.push(`<circle cx="${cx}" cy="${cy}" r="2.5" fill="${color}"/>`);
    }
  });

  // legend, top left inside the plot area
  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = y1 + 10 + 18 * i;
    parts.push(
      `<line x1="${x0 + 10}" y1="${ly}" x2="${x0 + 34}" y2="${ly}" ` +
        `stroke="${color}" stroke-width="1.8"/>`,
    );
    parts.push(
      `<text x="${x0 + 40}" y="${ly}" dy="4">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
