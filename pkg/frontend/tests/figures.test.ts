import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { SchemaError } from "../src/csv.js";
import { FIGURE_KINDS, buildFigure } from "../src/figures.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

export const KIND_TO_FIXTURE: Record<string, string> = {
  energy_vs_pmax: "sweep_p_max.csv",
  delay_vs_pmax: "sweep_p_max.csv",
  energy_vs_fmax: "sweep_f_max.csv",
  delay_vs_fmax: "sweep_f_max.csv",
  energy_vs_devices: "sweep_devices.csv",
  energy_vs_radius: "sweep_radius.csv",
  energy_vs_local_iters: "sweep_local_iters.csv",
  comparison_fixed_t: "comparison.csv",
};

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

describe("buildFigure", () => {
  it("covers every figure kind with a fixture", () => {
    expect(Object.keys(KIND_TO_FIXTURE).sort()).toEqual(
      [...FIGURE_KINDS].sort(),
    );
  });

  for (const kind of FIGURE_KINDS) {
    it(`builds '${kind}' from its fixture`, () => {
      const figure = buildFigure(kind, fixture(KIND_TO_FIXTURE[kind]));
      expect(figure.series.length).toBeGreaterThan(0);
      for (const series of figure.series) {
        expect(series.points.length).toBeGreaterThan(0);
        const xs = series.points.map((p) => p.x);
        expect([...xs].sort((a, b) => a - b)).toEqual(xs);
      }
      expect(figure.xLabel).toMatch(/\(|devices|iterations/i);
      expect(figure.yLabel.length).toBeGreaterThan(0);
    });
  }

  it("weight sweeps keep one line per weight pair plus the benchmarks", () => {
    const figure = buildFigure("energy_vs_pmax", fixture("sweep_p_max.csv"));
    const labels = figure.series.map((s) => s.label);
    expect(labels.filter((l) => l.startsWith("w1=")).length).toBe(5);
    expect(labels).toContain("benchmark_a");
    expect(labels).toContain("benchmark_b");
    expect(figure.series.length).toBe(7);
  });

  it("comparison figure has one line per scheme", () => {
    const figure = buildFigure("comparison_fixed_t", fixture("comparison.csv"));
    // the fixture sweeps two power caps, so 4 schemes x 2 caps
    expect(figure.series.length).toBe(8);
  });

  it("rejects a CSV whose axis does not match the kind", () => {
    expect(() =>
      buildFigure("energy_vs_fmax", fixture("sweep_p_max.csv")),
    ).toThrowError(SchemaError);
    expect(() =>
      buildFigure("energy_vs_fmax", fixture("sweep_p_max.csv")),
    ).toThrowError(/f_max_ghz/);
  });
});
