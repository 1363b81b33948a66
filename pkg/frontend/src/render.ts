import { readFileSync, writeFileSync } from "node:fs";

import { FIGURE_KINDS, FigureKind, buildFigure } from "./figures.js";
import { renderSvg } from "./svg.js";

export interface RenderRequest {
  csvPath: string;
  kind: string;
  outPath: string;
}

/** Reads the CSV, builds the figure, and writes the SVG.
 *
 * The output file is only written after the figure builds successfully, so
 * schema errors never leave a partial image behind.
 */
export function render(request: RenderRequest): void {
  if (!(FIGURE_KINDS as readonly string[]).includes(request.kind)) {
    throw new Error(
      `unknown figure kind '${request.kind}'; expected one of ` +
        FIGURE_KINDS.join(", "),
    );
  }
  const csvText = readFileSync(request.csvPath, "utf-8");
  const figure = buildFigure(request.kind as FigureKind, csvText);
  const svg = renderSvg(figure);
  writeFileSync(request.outPath, svg, "utf-8");
}
