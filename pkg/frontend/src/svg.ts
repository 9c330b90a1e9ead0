import { Scale, tickLabel } from "./scale.js";

/** Fixed figure geometry; every default is named here, nothing inline. */
export const FIGURE_WIDTH = 760;
export const FIGURE_HEIGHT = 520;
export const MARGIN = { top: 48, right: 28, bottom: 58, left: 78 } as const;
export const FONT_FAMILY = "Menlo, Consolas, monospace";
export const FONT_SIZE = 13;
export const TITLE_SIZE = 15;
export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
export const GRID_COLOR = "#dddddd";
export const AXIS_COLOR = "#333333";

const fmt = (v: number): string => {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
};

const escapeXml = (s: string): string =>
  s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

/** Minimal deterministic SVG document builder. */
export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number = FIGURE_WIDTH,
    readonly height: number = FIGURE_HEIGHT,
  ) {
    this.parts.push(
      `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash?: string): void {
    if (points.length === 0) {
      return;
    }
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { anchor?: "start" | "middle" | "end"; size?: number; rotate?: boolean } = {},
  ): void {
    const anchor = opts.anchor ?? "start";
    const size = opts.size ?? FONT_SIZE;
    const transform = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="${FONT_FAMILY}" font-size="${size}" fill="${AXIS_COLOR}" text-anchor="${anchor}"${transform}>${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

export interface PlotArea {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export function plotArea(doc: SvgDoc): PlotArea {
  return {
    left: MARGIN.left,
    right: doc.width - MARGIN.right,
    top: MARGIN.top,
    bottom: doc.height - MARGIN.bottom,
  };
}

/** Frame, grid lines, tick labels and axis titles for an x/y chart. */
export function drawAxes(
  doc: SvgDoc,
  area: PlotArea,
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): void {
  doc.text((area.left + area.right) / 2, MARGIN.top - 18, title, {
    anchor: "middle",
    size: TITLE_SIZE,
  });
  for (const t of x.ticks) {
    const px = x.map(t);
    doc.line(px, area.top, px, area.bottom, GRID_COLOR);
    doc.text(px, area.bottom + 18, tickLabel(t), { anchor: "middle" });
  }
  for (const t of y.ticks) {
    const py = y.map(t);
    doc.line(area.left, py, area.right, py, GRID_COLOR);
    doc.text(area.left - 8, py + 4, tickLabel(t), { anchor: "end" });
  }
  doc.line(area.left, area.top, area.left, area.bottom, AXIS_COLOR);
  doc.line(area.left, area.bottom, area.right, area.bottom, AXIS_COLOR);
  doc.text((area.left + area.right) / 2, doc.height - 14, xLabel, { anchor: "middle" });
  doc.text(20, (area.top + area.bottom) / 2, yLabel, { anchor: "middle", rotate: true });
}

/** Colored line + label per series, stacked in the top-right corner. */
export function drawLegend(doc: SvgDoc, area: PlotArea, entries: Array<{ label: string; color: string; dash?: string }>): void {
  const x0 = area.right - 190;
  let yRow = area.top + 14;
  for (const entry of entries) {
    doc.line(x0, yRow - 4, x0 + 26, yRow - 4, entry.color, 2, entry.dash);
    doc.text(x0 + 34, yRow, entry.label);
    yRow += 20;
  }
}
