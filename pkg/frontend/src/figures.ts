import { mkdirSync, writeFileSync, existsSync } from "node:fs";
import { basename, dirname, extname } from "node:path";

import { InputError, numericColumn, readCsv } from "./csv.js";
import { readMatrixMarket } from "./mm.js";
import { AxisScale, makeScale } from "./scale.js";
import {
  AXIS_COLOR,
  PALETTE,
  PlotArea,
  SvgDoc,
  drawAxes,
  drawLegend,
  plotArea,
} from "./svg.js";

export const FIGURE_KINDS = ["spectrum", "orth_heatmap", "spy", "solution"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureOptions {
  /** axis scales; spectrum defaults to a log y axis, everything else linear */
  xscale?: AxisScale;
  yscale?: AxisScale;
  /** spectrum only: dashed vertical marker at this index */
  truncationIndex?: number;
  title?: string;
}

export interface FigureSpec {
  kind: FigureKind;
  /** CSV paths (spectrum, solution) or a Matrix Market path (heatmap, spy) */
  inputs: string[];
  /** .svg output path */
  output: string;
  options?: FigureOptions;
}

/** Heatmap color ramp endpoints: |value| 1e-16 (white) .. 1 (dark blue). */
export const HEATMAP_FLOOR_EXP = -16;
const HEATMAP_DARK: [number, number, number] = [31, 45, 122];

export class FigureSpecError extends Error {}

export function validateSpec(spec: FigureSpec): void {
  if (!FIGURE_KINDS.includes(spec.kind)) {
    throw new FigureSpecError(
      `unknown figure kind '${spec.kind}' (expected one of ${FIGURE_KINDS.join(", ")})`,
    );
  }
  if (!spec.inputs || spec.inputs.length === 0) {
    throw new FigureSpecError("spec needs at least one input path");
  }
  for (const input of spec.inputs) {
    if (!existsSync(input)) {
      throw new FigureSpecError(`input does not exist: ${input}`);
    }
  }
  const ext = extname(spec.output).toLowerCase();
  if (ext === ".png") {
    throw new FigureSpecError(
      "PNG output is not supported in this build (no raster backend); use an .svg output path",
    );
  }
  if (ext !== ".svg") {
    throw new FigureSpecError(`output must end in .svg, got '${spec.output}'`);
  }
  const trunc = spec.options?.truncationIndex;
  if (trunc !== undefined && (!Number.isInteger(trunc) || trunc < 0)) {
    throw new FigureSpecError(`truncation index must be a non-negative integer, got ${trunc}`);
  }
  for (const axis of ["xscale", "yscale"] as const) {
    const v = spec.options?.[axis];
    if (v !== undefined && v !== "linear" && v !== "log") {
      throw new FigureSpecError(`${axis} must be 'linear' or 'log', got '${v}'`);
    }
  }
}

/** Render to an SVG string without touching the filesystem output. */
export function renderToString(spec: FigureSpec): string {
  validateSpec(spec);
  switch (spec.kind) {
    case "spectrum":
      return renderSpectrum(spec);
    case "orth_heatmap":
      return renderOrthHeatmap(spec);
    case "spy":
      return renderSpy(spec);
    case "solution":
      return renderSolution(spec);
  }
}

/** Render and write the figure; returns the SVG text that was written. */
export function render(spec: FigureSpec): string {
  const svg = renderToString(spec);
  mkdirSync(dirname(spec.output) || ".", { recursive: true });
  writeFileSync(spec.output, svg, "utf-8");
  return svg;
}

const seriesName = (path: string): string => basename(path, extname(path));

interface Series {
  name: string;
  points: Array<[number, number]>;
}

function renderSpectrum(spec: FigureSpec): string {
  const xscale: AxisScale = spec.options?.xscale ?? "linear";
  const yscale: AxisScale = spec.options?.yscale ?? "log";
  const series: Series[] = spec.inputs.map((path) => {
    const rows = readCsv(path);
    const sigma = numericColumn(rows, "sigma", path);
    const index =
      rows.length > 0 && "index" in rows[0]
        ? numericColumn(rows, "index", path)
        : sigma.map((_, i) => i);
    const points = index
      .map((ix, i) => [ix, sigma[i]] as [number, number])
      .filter(([ix, s]) => (yscale === "log" ? s > 0 : true) && (xscale === "log" ? ix > 0 : true))
      .sort((a, b) => a[0] - b[0]);
    if (points.length === 0) {
      throw new InputError(`${path}: no plottable values for ${xscale}/${yscale} axes`);
    }
    return { name: seriesName(path), points };
  });

  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const doc = new SvgDoc();
  const area = plotArea(doc);
  const x = makeScale(xscale, Math.min(...xs), Math.max(...xs), area.left, area.right);
  const y = makeScale(yscale, Math.min(...ys), Math.max(...ys), area.bottom, area.top);
  drawAxes(doc, area, x, y, "index", "sigma", spec.options?.title ?? "singular-value spectrum");

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    doc.polyline(s.points.map(([px, py]) => [x.map(px), y.map(py)]), color, 1.8);
    if (s.points.length === 1) {
      doc.circle(x.map(s.points[0][0]), y.map(s.points[0][1]), 3, color);
    }
  });

  const trunc = spec.options?.truncationIndex;
  if (trunc !== undefined) {
    const px = x.map(trunc);
    doc.line(px, area.top, px, area.bottom, AXIS_COLOR, 1.2, "6,4");
    doc.text(px + 6, area.top + 14, `truncation @ ${trunc}`);
  }
  drawLegend(
    doc,
    area,
    series.map((s, i) => ({ label: s.name, color: PALETTE[i % PALETTE.length] })),
  );
  return doc.render();
}

function heatColor(value: number): string | null {
  const mag = Math.abs(value);
  if (mag === 0) {
    return null; // exact zeros stay background-white
  }
  const t = Math.min(1, Math.max(0, 1 - Math.log10(mag) / HEATMAP_FLOOR_EXP));
  const ch = (dark: number): number => Math.round(255 + (dark - 255) * t);
  return `rgb(${ch(HEATMAP_DARK[0])},${ch(HEATMAP_DARK[1])},${ch(HEATMAP_DARK[2])})`;
}

interface MatrixCanvas {
  px: (col: number) => number;
  py: (row: number) => number;
  cellW: number;
  cellH: number;
}

/** Shared frame for matrix-indexed figures: row 0 on top, column 0 left. */
function matrixCanvas(
  doc: SvgDoc,
  area: PlotArea,
  nrows: number,
  ncols: number,
  title: string,
): MatrixCanvas {
  const cellW = (area.right - area.left) / Math.max(1, ncols);
  const cellH = (area.bottom - area.top) / Math.max(1, nrows);
  doc.text((area.left + area.right) / 2, area.top - 18, title, { anchor: "middle", size: 15 });
  doc.line(area.left, area.top, area.right, area.top, AXIS_COLOR);
  doc.line(area.left, area.bottom, area.right, area.bottom, AXIS_COLOR);
  doc.line(area.left, area.top, area.left, area.bottom, AXIS_COLOR);
  doc.line(area.right, area.top, area.right, area.bottom, AXIS_COLOR);
  doc.text(area.left, area.bottom + 18, "0", { anchor: "middle" });
  doc.text(area.right, area.bottom + 18, String(ncols), { anchor: "middle" });
  doc.text((area.left + area.right) / 2, doc.height - 14, "column", { anchor: "middle" });
  doc.text(area.left - 8, area.top + 5, "0", { anchor: "end" });
  doc.text(area.left - 8, area.bottom + 5, String(nrows), { anchor: "end" });
  doc.text(20, (area.top + area.bottom) / 2, "row", { anchor: "middle", rotate: true });
  return {
    px: (col) => area.left + col * cellW,
    py: (row) => area.top + row * cellH,
    cellW,
    cellH,
  };
}

function renderOrthHeatmap(spec: FigureSpec): string {
  const mat = readMatrixMarket(spec.inputs[0]);
  const doc = new SvgDoc();
  const area = plotArea(doc);
  const title = spec.options?.title ?? `|Q^T Q| (${mat.nrows} x ${mat.ncols})`;
  const canvas = matrixCanvas(doc, area, mat.nrows, mat.ncols, title);
  for (const { row, col, value } of mat.entries) {
    const fill = heatColor(value);
    if (fill !== null) {
      doc.rect(canvas.px(col), canvas.py(row), canvas.cellW, canvas.cellH, fill);
    }
  }
  doc.text(area.left, area.bottom + 38, `white = |value| <= 1e${HEATMAP_FLOOR_EXP}, dark = 1`);
  return doc.render();
}

/** Spy markers never shrink below this many pixels, however large the matrix. */
export const SPY_MIN_MARKER_PX = 1;

function renderSpy(spec: FigureSpec): string {
  const mat = readMatrixMarket(spec.inputs[0]);
  const doc = new SvgDoc();
  const area = plotArea(doc);
  const title =
    spec.options?.title ?? `sparsity pattern (${mat.nrows} x ${mat.ncols}, nnz = ${mat.entries.length})`;
  const canvas = matrixCanvas(doc, area, mat.nrows, mat.ncols, title);
  const w = Math.max(SPY_MIN_MARKER_PX, canvas.cellW);
  const h = Math.max(SPY_MIN_MARKER_PX, canvas.cellH);
  for (const { row, col } of mat.entries) {
    doc.rect(canvas.px(col), canvas.py(row), w, h, AXIS_COLOR);
  }
  return doc.render();
}

function renderSolution(spec: FigureSpec): string {
  const path = spec.inputs[0];
  const rows = readCsv(path);
  const xsAll = numericColumn(rows, "x", path);
  const xscale: AxisScale = spec.options?.xscale ?? "linear";
  const yscale: AxisScale = spec.options?.yscale ?? "linear";

  const series: Series[] = (["predicted", "exact"] as const).map((column) => {
    const values = numericColumn(rows, column, path);
    const points = xsAll
      .map((vx, i) => [vx, values[i]] as [number, number])
      .filter(([vx, vy]) => (xscale === "log" ? vx > 0 : true) && (yscale === "log" ? vy > 0 : true))
      .sort((a, b) => a[0] - b[0]);
    if (points.length === 0) {
      throw new InputError(`${path}: column '${column}' has no plottable values for ${xscale}/${yscale} axes`);
    }
    return { name: column, points };
  });

  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const doc = new SvgDoc();
  const area = plotArea(doc);
  const x = makeScale(xscale, Math.min(...xs), Math.max(...xs), area.left, area.right);
  const y = makeScale(yscale, Math.min(...ys), Math.max(...ys), area.bottom, area.top);
  drawAxes(doc, area, x, y, "x", "phi", spec.options?.title ?? "solution vs exact");

  const styles = [
    { color: PALETTE[0], dash: undefined as string | undefined, width: 1.8 },
    { color: PALETTE[1], dash: "7,5", width: 1.8 },
  ];
  series.forEach((s, i) => {
    doc.polyline(
      s.points.map(([px, py]) => [x.map(px), y.map(py)]),
      styles[i].color,
      styles[i].width,
      styles[i].dash,
    );
  });
  drawLegend(
    doc,
    area,
    series.map((s, i) => ({ label: s.name, color: styles[i].color, dash: styles[i].dash })),
  );
  return doc.render();
}
