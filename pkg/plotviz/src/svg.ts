/**
 * Two-panel SVG renderer for filter-comparison error curves: rotational
 * extrinsic error on top, translational below, one line per filter.
 *
 * Rendering is a pure function of the parsed log and options, so identical
 * input produces an identical SVG string.
 */

import { NumericColumn, RunLog } from "./csv.js";

export interface PlotOptions {
  logy?: boolean;
  width?: number;
  panelHeight?: number;
  title?: string;
}

interface PanelSpec {
  column: NumericColumn;
  label: string;
}

const PANELS: PanelSpec[] = [
  { column: "rot_err_ext", label: "rotational error [rad]" },
  { column: "pos_err_ext", label: "translational error [m]" },
];

const COLORS = [
  "#d62728",
  "#1f77b4",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

const MARGIN = { left: 72, right: 24, top: 34, bottom: 44 };

function fmt(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(value.toPrecision(4)));
  }
  return value.toExponential(1);
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const tick = step * factor;
  const start = Math.ceil(lo / tick) * tick;
  const out: number[] = [];
  for (let v = start; v <= hi + tick * 1e-9; v += tick) out.push(v);
  return out;
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    out.push(Math.pow(10, e));
  }
  return out.length > 0 ? out : [lo];
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function render(log: RunLog, options: PlotOptions = {}): string {
  const width = options.width ?? 760;
  const panelHeight = options.panelHeight ?? 240;
  const logy = options.logy ?? false;
  const height = MARGIN.top + PANELS.length * (panelHeight + MARGIN.bottom);
  const plotW = width - MARGIN.left - MARGIN.right;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}" ` +
      `font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">` +
        `${esc(options.title)}</text>`,
    );
  }

  PANELS.forEach((panel, index) => {
    const top = MARGIN.top + index * (panelHeight + MARGIN.bottom);
    parts.push(
      renderPanel(log, panel, logy, top, panelHeight, plotW, index === 0),
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}

function renderPanel(
  log: RunLog,
  panel: PanelSpec,
  logy: boolean,
  top: number,
  panelHeight: number,
  plotW: number,
  withLegend: boolean,
): string {
  const left = MARGIN.left;
  const bottom = top + panelHeight;
  const parts: string[] = [];

  // data ranges
  let tMin = Infinity;
  let tMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const name of log.filters) {
    const s = log.series.get(name)!;
    for (let i = 0; i < s.t.length; i++) {
      const y = s.columns[panel.column][i];
      if (logy && y <= 0) continue;
      tMin = Math.min(tMin, s.t[i]);
      tMax = Math.max(tMax, s.t[i]);
      yMin = Math.min(yMin, y);
      yMax = Math.max(yMax, y);
    }
  }
  const empty = !Number.isFinite(tMin);
  if (empty) {
    tMin = 0;
    tMax = 1;
    yMin = logy ? 1e-3 : 0;
    yMax = 1;
  }
  if (tMax === tMin) tMax = tMin + 1;
  if (yMax === yMin) yMax = yMin === 0 ? 1 : yMin * (logy ? 10 : 2);

  const xOf = (t: number) => left + ((t - tMin) / (tMax - tMin)) * plotW;
  const yOf = (y: number) =>
    logy
      ? bottom -
        ((Math.log10(y) - Math.log10(yMin)) /
          (Math.log10(yMax) - Math.log10(yMin))) *
          panelHeight
      : bottom - ((y - yMin) / (yMax - yMin)) * panelHeight;

  // frame and grid
  parts.push(
    `<rect x="${left}" y="${top}" width="${plotW}" height="${panelHeight}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`,
  );
  const xTicks = niceTicks(tMin, tMax, 8);
  for (const t of xTicks) {
    const x = xOf(t);
    parts.push(
      `<line x1="${x.toFixed(2)}" y1="${bottom}" x2="${x.toFixed(2)}" ` +
        `y2="${bottom + 5}" stroke="#333"/>`,
      `<text x="${x.toFixed(2)}" y="${bottom + 18}" text-anchor="middle" ` +
        `font-size="11">${fmt(t)}</text>`,
    );
  }
  const yTicks = logy ? logTicks(yMin, yMax) : niceTicks(yMin, yMax, 6);
  for (const y of yTicks) {
    const yy = yOf(y);
    parts.push(
      `<line x1="${left - 5}" y1="${yy.toFixed(2)}" x2="${left}" ` +
        `y2="${yy.toFixed(2)}" stroke="#333"/>`,
      `<line x1="${left}" y1="${yy.toFixed(2)}" x2="${left + plotW}" ` +
        `y2="${yy.toFixed(2)}" stroke="#ddd" stroke-width="0.5"/>`,
      `<text x="${left - 8}" y="${(yy + 4).toFixed(2)}" text-anchor="end" ` +
        `font-size="11">${fmt(y)}</text>`,
    );
  }

  // axis labels (units)
  parts.push(
    `<text x="${left + plotW / 2}" y="${bottom + 34}" text-anchor="middle" ` +
      `font-size="12">time [s]</text>`,
    `<text x="${left - 52}" y="${top + panelHeight / 2}" ` +
      `text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 ${left - 52} ${top + panelHeight / 2})">` +
      `${esc(panel.label)}</text>`,
  );

  // curves: polyline per filter, split where log scale drops points
  log.filters.forEach((name, idx) => {
    const s = log.series.get(name)!;
    const color = COLORS[idx % COLORS.length];
    let segment: string[] = [];
    const flush = () => {
      if (segment.length >= 2) {
        parts.push(
          `<polyline fill="none" stroke="${color}" stroke-width="1.5" ` +
            `points="${segment.join(" ")}"/>`,
        );
      }
      segment = [];
    };
    for (let i = 0; i < s.t.length; i++) {
      const y = s.columns[panel.column][i];
      if (logy && y <= 0) {
        flush();
        continue;
      }
      segment.push(`${xOf(s.t[i]).toFixed(2)},${yOf(y).toFixed(2)}`);
    }
    flush();
  });

  // legend: one entry per filter, top-right of the first panel
  if (withLegend && log.filters.length > 0) {
    const legendX = left + plotW - 130;
    log.filters.forEach((name, idx) => {
      const y = top + 16 + idx * 16;
      const color = COLORS[idx % COLORS.length];
      parts.push(
        `<line x1="${legendX}" y1="${y - 4}" x2="${legendX + 22}" ` +
          `y2="${y - 4}" stroke="${color}" stroke-width="2"/>`,
        `<text x="${legendX + 28}" y="${y}" font-size="11">${esc(name)}</text>`,
      );
    });
  }
  return parts.join("\n");
}
