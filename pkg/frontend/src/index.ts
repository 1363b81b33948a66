export {
  SchemaError,
  parseComparisonCsv,
  parseSweepCsv,
} from "./csv.js";
export type { ComparisonRow, SweepRow } from "./csv.js";
export { FIGURE_KINDS, buildFigure } from "./figures.js";
export type { Figure, FigureKind, Series } from "./figures.js";
export { render } from "./render.js";
export type { RenderRequest } from "./render.js";
export { renderSvg } from "./svg.js";
