import { readFileSync } from "node:fs";

import { InputError } from "./csv.js";

export interface MatrixEntry {
  row: number;
  col: number;
  value: number;
}

export interface CoordinateMatrix {
  nrows: number;
  ncols: number;
  entries: MatrixEntry[];
}

/**
 * Read a coordinate-format Matrix Market file (field real, symmetry general
 * or symmetric). Indices are converted to 0-based; symmetric files have
 * their off-diagonal entries mirrored.
 */
export function readMatrixMarket(path: string): CoordinateMatrix {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new InputError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const lines = text.split(/\r?\n/);
  const header = (lines[0] ?? "").trim().toLowerCase().split(/\s+/);
  if (
    header.length !== 5 ||
    header[0] !== "%%matrixmarket" ||
    header[1] !== "matrix" ||
    header[2] !== "coordinate" ||
    header[3] !== "real" ||
    (header[4] !== "general" && header[4] !== "symmetric")
  ) {
    throw new InputError(
      `${path}: unsupported Matrix Market header '${(lines[0] ?? "").trim()}' ` +
        "(only 'matrix coordinate real general' or 'matrix coordinate real symmetric' is readable)",
    );
  }
  const symmetric = header[4] === "symmetric";

  let i = 1;
  while (i < lines.length && (lines[i].trim() === "" || lines[i].trimStart().startsWith("%"))) {
    i += 1;
  }
  const sizeParts = (lines[i] ?? "").trim().split(/\s+/).map(Number);
  if (sizeParts.length !== 3 || sizeParts.some((v) => !Number.isInteger(v) || v < 0)) {
    throw new InputError(`${path}: malformed size line '${(lines[i] ?? "").trim()}'`);
  }
  const [nrows, ncols, nnz] = sizeParts;
  i += 1;

  const entries: MatrixEntry[] = [];
  let seen = 0;
  for (; i < lines.length; i += 1) {
    const line = lines[i].trim();
    if (line === "" || line.startsWith("%")) {
      continue;
    }
    const parts = line.split(/\s+/);
    if (parts.length !== 3) {
      throw new InputError(`${path}: malformed entry '${line}'`);
    }
    const row = Number(parts[0]);
    const col = Number(parts[1]);
    const value = Number(parts[2]);
    if (!Number.isInteger(row) || !Number.isInteger(col) || !Number.isFinite(value)) {
      throw new InputError(`${path}: malformed entry '${line}'`);
    }
    if (row < 1 || row > nrows || col < 1 || col > ncols) {
      throw new InputError(`${path}: index out of range in '${line}'`);
    }
    entries.push({ row: row - 1, col: col - 1, value });
    if (symmetric && row !== col) {
      entries.push({ row: col - 1, col: row - 1, value });
    }
    seen += 1;
  }
  if (seen !== nnz) {
    throw new InputError(`${path}: size line promises ${nnz} entries, found ${seen}`);
  }
  return { nrows, ncols, entries };
}
