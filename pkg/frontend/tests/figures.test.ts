import { describe, expect, it } from "vitest";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const HERE = dirname(fileURLToPath(import.meta.url));

import { InputError, readCsv } from "../src/csv.js";
import {
  FigureSpec,
  FigureSpecError,
  render,
  renderToString,
  validateSpec,
} from "../src/figures.js";
import { PALETTE, AXIS_COLOR } from "../src/svg.js";

const FIXTURES = join(HERE, "fixtures");

function tmpPath(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "fig-test-")), name);
}

function tmpFile(name: string, content: string): string {
  const path = tmpPath(name);
  writeFileSync(path, content);
  return path;
}

interface Polyline {
  points: Array<[number, number]>;
  stroke: string;
  dash?: string;
}

/** Pull every polyline out of the SVG text with its style. */
function polylines(svg: string): Polyline[] {
  const out: Polyline[] = [];
  const re = /<polyline points="([^"]*)"[^>]*stroke="([^"]*)"[^>]*?( stroke-dasharray="([^"]*)")?\/>/g;
  for (const m of svg.matchAll(re)) {
    const points = m[1]
      .split(" ")
      .filter((p) => p.length > 0)
      .map((p) => {
        const [x, y] = p.split(",").map(Number);
        return [x, y] as [number, number];
      });
    out.push({ points, stroke: m[2], dash: m[4] });
  }
  return out;
}

/** Pull every rect with the given fill (skips the white background). */
function rects(svg: string, fillPrefix: string): Array<{ x: number; y: number }> {
  const out: Array<{ x: number; y: number }> = [];
  const re = /<rect x="([^"]*)" y="([^"]*)" width="[^"]*" height="[^"]*" fill="([^"]*)"\/>/g;
  for (const m of svg.matchAll(re)) {
    if (m[3].startsWith(fillPrefix) && m[3] !== "#ffffff") {
      out.push({ x: Number(m[1]), y: Number(m[2]) });
    }
  }
  return out;
}

/** Mean of |ux - uy| over markers, coordinates normalized to [0, 1]. */
function alignmentSpread(marks: Array<{ x: number; y: number }>): number {
  const xs = marks.map((m) => m.x);
  const ys = marks.map((m) => m.y);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  let acc = 0;
  for (const m of marks) {
    acc += Math.abs((m.x - x0) / (x1 - x0) - (m.y - y0) / (y1 - y0));
  }
  return acc / marks.length;
}

describe("spectrum figures", () => {
  it("renders the spectrum of an identity operator as a flat line", () => {
    const path = tmpFile(
      "identity.csv",
      "sigma\n" + Array.from({ length: 8 }, () => "1.0\n").join(""),
    );
    const svg = renderToString({ kind: "spectrum", inputs: [path], output: "x.svg" });
    const lines = polylines(svg);
    expect(lines).toHaveLength(1);
    expect(lines[0].points).toHaveLength(8);
    const yCoords = lines[0].points.map(([, y]) => y);
    expect(new Set(yCoords).size).toBe(1);
    const xCoords = lines[0].points.map(([x]) => x);
    for (let i = 1; i < xCoords.length; i++) {
      expect(xCoords[i]).toBeGreaterThan(xCoords[i - 1]);
    }
  });

  it("overlays two spectra as separately colored, labelled series", () => {
    const svg = renderToString({
      kind: "spectrum",
      inputs: [join(FIXTURES, "ritz_spectrum.csv"), join(FIXTURES, "true_spectrum.csv")],
      output: "x.svg",
    });
    const lines = polylines(svg);
    expect(lines).toHaveLength(2);
    expect(lines[0].stroke).toBe(PALETTE[0]);
    expect(lines[1].stroke).toBe(PALETTE[1]);
    expect(lines[0].stroke).not.toBe(lines[1].stroke);
    expect(svg).toContain(">ritz_spectrum</text>");
    expect(svg).toContain(">true_spectrum</text>");
    // where the run flagged convergence the Ritz values track the analytic
    // law, so those stretches of the two curves coincide to within a pixel
    const rows = readCsv(join(FIXTURES, "ritz_spectrum.csv"));
    const convergedAt = rows.filter((r) => r.converged === 1).map((r) => r.index as number);
    expect(convergedAt.length).toBeGreaterThan(5);
    for (const i of convergedAt) {
      expect(lines[0].points[i][1]).toBeCloseTo(lines[1].points[i][1], 0);
    }
  });

  it("marks the truncation index with a dashed vertical rule", () => {
    const svg = renderToString({
      kind: "spectrum",
      inputs: [join(FIXTURES, "ritz_spectrum.csv")],
      output: "x.svg",
      options: { truncationIndex: 12 },
    });
    expect(svg).toContain("truncation @ 12");
    expect(svg).toMatch(/<line [^>]*stroke-dasharray="6,4"\/>/);
  });

  it("supports log-log axes by dropping non-positive coordinates", () => {
    const path = tmpFile("withzero.csv", "index,sigma\n0,1.0\n1,0.5\n2,0.25\n");
    const svg = renderToString({
      kind: "spectrum",
      inputs: [path],
      output: "x.svg",
      options: { xscale: "log", yscale: "log" },
    });
    // index 0 cannot sit on a log x axis
    expect(polylines(svg)[0].points).toHaveLength(2);
  });

  it("rejects a series with nothing plottable on the requested axes", () => {
    const path = tmpFile("allzero.csv", "sigma\n0.0\n0.0\n");
    expect(() =>
      renderToString({ kind: "spectrum", inputs: [path], output: "x.svg" }),
    ).toThrowError(InputError);
  });

  it("requires a sigma column and names the columns it found", () => {
    expect(() =>
      renderToString({
        kind: "spectrum",
        inputs: [join(FIXTURES, "solution.csv")],
        output: "x.svg",
      }),
    ).toThrowError(/x, predicted, exact, abs_error/);
  });
});

describe("orthogonality heatmap", () => {
  it("paints an exact identity Gram matrix as dark diagonal cells only", () => {
    const path = tmpFile(
      "identity.mtx",
      "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1.0\n2 2 1.0\n3 3 1.0\n",
    );
    const svg = renderToString({ kind: "orth_heatmap", inputs: [path], output: "x.svg" });
    const cells = rects(svg, "rgb(");
    expect(cells).toHaveLength(3);
    // |value| = 1 maps to the dark end of the ramp
    expect(svg).toContain('fill="rgb(31,45,122)"');
    const sorted = [...cells].sort((a, b) => a.x - b.x);
    for (let i = 1; i < sorted.length; i++) {
      expect(sorted[i].y).toBeGreaterThan(sorted[i - 1].y);
    }
  });

  it("skips exact zeros so they stay background white", () => {
    const path = tmpFile(
      "withzero.mtx",
      "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n2 2 1.0\n1 2 0.0\n",
    );
    const svg = renderToString({ kind: "orth_heatmap", inputs: [path], output: "x.svg" });
    expect(rects(svg, "rgb(")).toHaveLength(2);
  });

  it("renders a computed Gram matrix and documents the color ramp", () => {
    const svg = renderToString({
      kind: "orth_heatmap",
      inputs: [join(FIXTURES, "gram_uu.mtx")],
      output: "x.svg",
    });
    expect(svg).toContain("|Q^T Q| (40 x 40)");
    expect(svg).toContain("white = |value| &lt;= 1e-16, dark = 1");
    expect(rects(svg, "rgb(").length).toBeGreaterThan(40);
  });
});

describe("sparsity pattern (spy)", () => {
  it("shows a banded system when collocation rows are ordered", () => {
    const svg = renderToString({
      kind: "spy",
      inputs: [join(FIXTURES, "system_ordered.mtx")],
      output: "x.svg",
    });
    expect(svg).toContain("sparsity pattern (102 x 60, nnz = 604)");
    const marks = rects(svg, AXIS_COLOR);
    expect(marks).toHaveLength(604);
    expect(alignmentSpread(marks)).toBeLessThan(0.1);
  });

  it("loses the band when collocation rows are shuffled", () => {
    const ordered = rects(
      renderToString({
        kind: "spy",
        inputs: [join(FIXTURES, "system_ordered.mtx")],
        output: "x.svg",
      }),
      AXIS_COLOR,
    );
    const shuffled = rects(
      renderToString({
        kind: "spy",
        inputs: [join(FIXTURES, "system_shuffled.mtx")],
        output: "x.svg",
      }),
      AXIS_COLOR,
    );
    expect(shuffled).toHaveLength(ordered.length);
    expect(alignmentSpread(shuffled)).toBeGreaterThan(0.2);
    expect(alignmentSpread(shuffled)).toBeGreaterThan(3 * alignmentSpread(ordered));
  });
});

describe("solution profiles", () => {
  it("draws predicted (solid) and exact (dashed) series with a legend", () => {
    const svg = renderToString({
      kind: "solution",
      inputs: [join(FIXTURES, "solution.csv")],
      output: "x.svg",
    });
    const lines = polylines(svg);
    expect(lines).toHaveLength(2);
    expect(lines[0].stroke).toBe(PALETTE[0]);
    expect(lines[0].dash).toBeUndefined();
    expect(lines[1].stroke).toBe(PALETTE[1]);
    expect(lines[1].dash).toBe("7,5");
    expect(lines[0].points).toHaveLength(401);
    expect(svg).toContain(">predicted</text>");
    expect(svg).toContain(">exact</text>");
  });

  it("filters the x = 0 sample on log-log axes", () => {
    const svg = renderToString({
      kind: "solution",
      inputs: [join(FIXTURES, "solution.csv")],
      output: "x.svg",
      options: { xscale: "log", yscale: "log" },
    });
    for (const line of polylines(svg)) {
      expect(line.points.length).toBeLessThan(401);
      expect(line.points.length).toBeGreaterThan(350);
    }
  });
});

describe("spec validation", () => {
  const good: FigureSpec = {
    kind: "spectrum",
    inputs: [join(FIXTURES, "ritz_spectrum.csv")],
    output: "out.svg",
  };

  it("accepts a well-formed spec", () => {
    expect(() => validateSpec(good)).not.toThrow();
  });

  it.each([
    [{ ...good, kind: "histogram" as FigureSpec["kind"] }, /unknown figure kind/],
    [{ ...good, inputs: [] }, /at least one input/],
    [{ ...good, inputs: ["/nope/missing.csv"] }, /does not exist/],
    [{ ...good, output: "out.png" }, /PNG output is not supported/],
    [{ ...good, output: "out.pdf" }, /must end in .svg/],
    [{ ...good, options: { truncationIndex: -1 } }, /non-negative integer/],
    [{ ...good, options: { truncationIndex: 2.5 } }, /non-negative integer/],
    [{ ...good, options: { yscale: "cubic" as "log" } }, /'linear' or 'log'/],
  ])("rejects a malformed spec", (spec, message) => {
    expect(() => validateSpec(spec)).toThrowError(FigureSpecError);
    expect(() => validateSpec(spec)).toThrowError(message);
  });
});

describe("render", () => {
  it("writes the SVG file, creating parent directories", () => {
    const out = join(tmpPath("deep"), "nested", "fig.svg");
    const svg = render({
      kind: "spectrum",
      inputs: [join(FIXTURES, "ritz_spectrum.csv")],
      output: out,
    });
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf-8")).toBe(svg);
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  });

  it("is deterministic: identical spec and inputs give identical bytes", () => {
    const spec: FigureSpec = {
      kind: "spectrum",
      inputs: [join(FIXTURES, "ritz_spectrum.csv"), join(FIXTURES, "true_spectrum.csv")],
      output: "x.svg",
      options: { truncationIndex: 20, title: "repeat" },
    };
    expect(renderToString(spec)).toBe(renderToString(spec));
  });
});
