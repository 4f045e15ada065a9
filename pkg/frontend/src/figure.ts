/**
 * Regret-versus-round figure rendering (SVG).
 *
 * One series per input table: the mean-regret curve with a shaded
 * standard-error band, x on a log scale by default. If any table carries
 * the regret-floor column, the first such table contributes a dashed
 * reference line. Every plotted value comes straight out of a CSV; this
 * module only maps values to pixels.
 */

import { RegretTable } from "./csv.js";

export interface Curve {
  label: string;
  table: RegretTable;
}

export interface FigureOptions {
  logX?: boolean; // default true
  width?: number;
  height?: number;
  title?: string;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { top: 36, right: 24, bottom: 52, left: 72 };

function fmt(x: number): string {
  return Number.isInteger(x) ? String(x) : x.toPrecision(6).replace(/\.?0+$/, "");
}

function powerOfTenLabel(exp: number): string {
  return `1e${exp}`;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Scale {
  (value: number): number;
}

function makeXScale(logX: boolean, xMin: number, xMax: number, x0: number, x1: number): Scale {
  if (logX) {
    const lo = Math.log10(xMin);
    const hi = Math.log10(xMax);
    return (v) => x0 + ((Math.log10(v) - lo) / (hi - lo || 1)) * (x1 - x0);
  }
  return (v) => x0 + ((v - xMin) / (xMax - xMin || 1)) * (x1 - x0);
}

function niceTicks(max: number, count = 6): number[] {
  if (max <= 0) return [0];
  const raw = max / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => max / s <= count) ?? 10 * mag;
  const ticks: number[] = [];
  for (let v = 0; v <= max + 1e-9; v += step) ticks.push(v);
  return ticks;
}

export function renderFigure(curves: Curve[], options: FigureOptions = {}): string {
  if (curves.length === 0) {
    throw new Error("no curves to plot");
  }
  const logX = options.logX ?? true;
  const width = options.width ?? 860;
  const height = options.height ?? 540;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;

  const allRows = curves.flatMap((c) => c.table.rows);
  const xMin = Math.min(...allRows.map((r) => r.checkpoint));
  const xMax = Math.max(...allRows.map((r) => r.checkpoint));
  if (logX && xMin <= 0) {
    throw new Error("log-scale x requires positive checkpoints");
  }
  const floorSource = curves.find((c) => c.table.hasLowerBound);
  const yCandidates = allRows.map((r) => r.meanRegret + r.stderrRegret);
  if (floorSource) {
    yCandidates.push(...floorSource.table.rows.map((r) => r.lowerBound as number));
  }
  const yMax = Math.max(...yCandidates) * 1.05;
  const sx = makeXScale(logX, xMin, xMax, x0, x1);
  const sy: Scale = (v) => y0 - (v / (yMax || 1)) * (y0 - y1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // axes
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black" stroke-width="1"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black" stroke-width="1"/>`,
  );

  // x ticks
  if (logX) {
    const eLo = Math.ceil(Math.log10(xMin));
    const eHi = Math.floor(Math.log10(xMax));
    for (let e = eLo; e <= eHi; e++) {
      const px = sx(Math.pow(10, e));
      parts.push(
        `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 6}" stroke="black"/>`,
        `<text x="${fmt(px)}" y="${y0 + 22}" text-anchor="middle" font-size="13">` +
          `${powerOfTenLabel(e)}</text>`,
      );
    }
  } else {
    for (const v of niceTicks(xMax)) {
      const px = sx(Math.max(v, xMin));
      parts.push(
        `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 6}" stroke="black"/>`,
        `<text x="${fmt(px)}" y="${y0 + 22}" text-anchor="middle" font-size="13">${fmt(v)}</text>`,
      );
    }
  }
  for (const v of niceTicks(yMax)) {
    const py = sy(v);
    parts.push(
      `<line x1="${x0 - 6}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="black"/>`,
      `<text x="${x0 - 10}" y="${fmt(py + 4)}" text-anchor="end" font-size="13">${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${height - 12}" text-anchor="middle" font-size="14">round</text>`,
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="14" ` +
      `transform="rotate(-90 18 ${(y0 + y1) / 2})">mean cumulative regret</text>`,
  );
  if (options.title) {
    parts.push(
      `<text x="${(x0 + x1) / 2}" y="22" text-anchor="middle" font-size="16">` +
        `${escapeXml(options.title)}</text>`,
    );
  }

  // standard-error bands first, curves on top
  curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const rows = curve.table.rows;
    const upper = rows.map((r) => `${fmt(sx(r.checkpoint))},${fmt(sy(r.meanRegret + r.stderrRegret))}`);
    const lower = rows
      .slice()
      .reverse()
      .map((r) => `${fmt(sx(r.checkpoint))},${fmt(sy(Math.max(0, r.meanRegret - r.stderrRegret)))}`);
    parts.push(
      `<polygon class="stderr-band" points="${upper.join(" ")} ${lower.join(" ")}" ` +
        `fill="${color}" fill-opacity="0.15" stroke="none"/>`,
    );
  });
  curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const d = curve.table.rows
      .map((r, j) => `${j === 0 ? "M" : "L"}${fmt(sx(r.checkpoint))} ${fmt(sy(r.meanRegret))}`)
      .join(" ");
    parts.push(
      `<path class="series" data-label="${escapeXml(curve.label)}" d="${d}" ` +
        `fill="none" stroke="${color}" stroke-width="2"/>`,
    );
  });

  if (floorSource) {
    const d = floorSource.table.rows
      .map(
        (r, j) =>
          `${j === 0 ? "M" : "L"}${fmt(sx(r.checkpoint))} ${fmt(sy(r.lowerBound as number))}`,
      )
      .join(" ");
    parts.push(
      `<path class="lower-bound" data-label="lower bound" d="${d}" fill="none" ` +
        `stroke="#444444" stroke-width="1.8" stroke-dasharray="7 5"/>`,
    );
  }

  // legend
  const legendX = x0 + 14;
  let legendY = y1 + 8;
  curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      `<line x1="${legendX}" y1="${legendY + 5}" x2="${legendX + 26}" y2="${legendY + 5}" ` +
        `stroke="${color}" stroke-width="2"/>`,
      `<text x="${legendX + 32}" y="${legendY + 9}" font-size="13">${escapeXml(curve.label)}</text>`,
    );
    legendY += 18;
  });
  if (floorSource) {
    parts.push(
      `<line x1="${legendX}" y1="${legendY + 5}" x2="${legendX + 26}" y2="${legendY + 5}" ` +
        `stroke="#444444" stroke-width="1.8" stroke-dasharray="7 5"/>`,
      `<text x="${legendX + 32}" y="${legendY + 9}" font-size="13">lower bound</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
