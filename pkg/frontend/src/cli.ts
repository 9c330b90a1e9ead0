#!/usr/bin/env node
import { readFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { InputError } from "./csv.js";
import {
  FIGURE_KINDS,
  FigureKind,
  FigureSpec,
  FigureSpecError,
  render,
} from "./figures.js";

/** Parse a `key = value` spec file; inputs are comma-separated. */
export function parseSpecFile(path: string): Partial<Record<string, string>> {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new InputError(`cannot read spec file ${path}: ${(err as Error).message}`);
  }
  const out: Record<string, string> = {};
  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.trim();
    if (line === "" || line.startsWith("#")) {
      continue;
    }
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new InputError(`spec file ${path}: expected 'key = value', got '${line}'`);
    }
    out[line.slice(0, eq).trim()] = line.slice(eq + 1).trim();
  }
  return out;
}

interface CliArgs {
  kind?: string;
  input?: string[];
  output?: string;
  xscale?: string;
  yscale?: string;
  truncationIndex?: number;
  title?: string;
  spec?: string;
}

/** Merge spec-file values and flags (flags win) into a FigureSpec. */
export function buildSpec(args: CliArgs): FigureSpec {
  const fileValues = args.spec ? parseSpecFile(args.spec) : {};
  const kind = args.kind ?? fileValues.kind;
  const inputs =
    args.input && args.input.length > 0
      ? args.input
      : (fileValues.inputs ?? "")
          .split(",")
          .map((s) => s.trim())
          .filter((s) => s !== "");
  const output = args.output ?? fileValues.output;
  if (!kind) {
    throw new FigureSpecError(`--kind is required (one of ${FIGURE_KINDS.join(", ")})`);
  }
  if (!output) {
    throw new FigureSpecError("--output is required");
  }
  const truncRaw = args.truncationIndex ?? (fileValues.truncation_index !== undefined ? Number(fileValues.truncation_index) : undefined);
  return {
    kind: kind as FigureKind,
    inputs,
    output,
    options: {
      xscale: (args.xscale ?? fileValues.xscale) as "linear" | "log" | undefined,
      yscale: (args.yscale ?? fileValues.yscale) as "linear" | "log" | undefined,
      truncationIndex: truncRaw,
      title: args.title ?? fileValues.title,
    },
  };
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("$0 --kind <kind> --input <path> [--input <path> ...] --output <fig.svg>")
    .option("kind", { type: "string", describe: `figure kind: ${FIGURE_KINDS.join(", ")}` })
    .option("input", { type: "string", array: true, alias: "i", describe: "CSV or Matrix Market input path (repeatable)" })
    .option("output", { type: "string", alias: "o", describe: "output .svg path" })
    .option("xscale", { type: "string", choices: ["linear", "log"] as const })
    .option("yscale", { type: "string", choices: ["linear", "log"] as const })
    .option("truncation-index", { type: "number", describe: "spectrum: dashed marker at this index" })
    .option("title", { type: "string" })
    .option("spec", { type: "string", describe: "key = value spec file; flags override it" })
    .help()
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const spec = buildSpec(args as CliArgs);
    render(spec);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (err) {
    if (err instanceof FigureSpecError || err instanceof InputError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(hideBin(process.argv)));
}
