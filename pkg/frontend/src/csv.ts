import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class InputError extends Error {}

export type CsvRow = Record<string, string | number | boolean | null>;

/** Parse a headered CSV file; numeric fields arrive as numbers. */
export function readCsv(path: string): CsvRow[] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new InputError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<CsvRow>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
    // all toolkit CSVs are comma-separated; auto-detection fails on
    // single-column files
    delimiter: ",",
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new InputError(`malformed CSV ${path}: ${first.message} (row ${first.row})`);
  }
  return parsed.data;
}

/** Extract a numeric column, failing loudly when it is absent or non-numeric. */
export function numericColumn(rows: CsvRow[], column: string, path: string): number[] {
  if (rows.length === 0) {
    throw new InputError(`${path} has no data rows`);
  }
  if (!(column in rows[0])) {
    const have = Object.keys(rows[0]).join(", ");
    throw new InputError(`${path} is missing column '${column}' (has: ${have})`);
  }
  return rows.map((row, i) => {
    const v = row[column];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new InputError(`${path} row ${i}: column '${column}' is not a finite number`);
    }
    return v;
  });
}
