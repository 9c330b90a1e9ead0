export { InputError, readCsv, numericColumn } from "./csv.js";
export { readMatrixMarket } from "./mm.js";
export type { CoordinateMatrix, MatrixEntry } from "./mm.js";
export { linearScale, logScale, makeScale, tickLabel } from "./scale.js";
export type { AxisScale, Scale } from "./scale.js";
export {
  FIGURE_KINDS,
  FigureSpecError,
  HEATMAP_FLOOR_EXP,
  render,
  renderToString,
  validateSpec,
} from "./figures.js";
export type { FigureKind, FigureOptions, FigureSpec } from "./figures.js";
export { buildSpec, main, parseSpecFile } from "./cli.js";
