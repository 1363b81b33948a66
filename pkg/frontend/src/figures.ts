import {
  ComparisonRow,
  SchemaError,
  SweepRow,
  parseComparisonCsv,
  parseSweepCsv,
} from "./csv.js";

export const FIGURE_KINDS = [
  "energy_vs_pmax",
  "delay_vs_pmax",
  "energy_vs_fmax",
  "delay_vs_fmax",
  "energy_vs_devices",
  "energy_vs_radius",
  "energy_vs_local_iters",
  "comparison_fixed_t",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface Series {
  label: string;
  points: { x: number; y: number }[];
}

export interface Figure {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

interface SweepKindSpec {
  axis: string;
  metric: "mean_energy_j" | "mean_delay_s";
  xLabel: string;
  yLabel: string;
  title: string;
  benchmarks: boolean;
}

const ENERGY = "Total energy consumption (J)";
const DELAY = "Total completion time (s)";

const SWEEP_KINDS: Record<string, SweepKindSpec> = {
  energy_vs_pmax: {
    axis: "p_max_dbm",
    metric: "mean_energy_j",
    xLabel: "Maximum transmission power (dBm)",
    yLabel: ENERGY,
    title: "Energy vs. maximum transmission power",
    benchmarks: true,
  },
  delay_vs_pmax: {
    axis: "p_max_dbm",
    metric: "mean_delay_s",
    xLabel: "Maximum transmission power (dBm)",
    yLabel: DELAY,
    title: "Completion time vs. maximum transmission power",
    benchmarks: true,
  },
  energy_vs_fmax: {
    axis: "f_max_ghz",
    metric: "mean_energy_j",
    xLabel: "Maximum CPU frequency (GHz)",
    yLabel: ENERGY,
    title: "Energy vs. maximum CPU frequency",
    benchmarks: true,
  },
  delay_vs_fmax: {
    axis: "f_max_ghz",
    metric: "mean_delay_s",
    xLabel: "Maximum CPU frequency (GHz)",
    yLabel: DELAY,
    title: "Completion time vs. maximum CPU frequency",
    benchmarks: true,
  },
  energy_vs_devices: {
    axis: "num_devices",
    metric: "mean_energy_j",
    xLabel: "Number of devices",
    yLabel: ENERGY,
    title: "Energy vs. number of devices",
    benchmarks: false,
  },
  energy_vs_radius: {
    axis: "radius_km",
    metric: "mean_energy_j",
    xLabel: "Cell radius (km)",
    yLabel: ENERGY,
    title: "Energy vs. cell radius",
    benchmarks: false,
  },
  energy_vs_local_iters: {
    axis: "local_iters",
    metric: "mean_energy_j",
    xLabel: "Local iterations per round",
    yLabel: ENERGY,
    title: "Energy vs. local iteration count",
    benchmarks: false,
  },
};

function sweepFigure(kind: string, rows: SweepRow[]): Figure {
  const spec = SWEEP_KINDS[kind];
  const axes = new Set(rows.map((r) => r.axis));
  if (!axes.has(spec.axis) || axes.size !== 1) {
    throw new SchemaError(
      `figure '${kind}' needs a sweep over axis '${spec.axis}', ` +
        `but the CSV sweeps '${[...axes].join(", ")}'`,
    );
  }
  const bySeries = new Map<string, Series>();
  for (const row of rows) {
    if (!spec.benchmarks && row.series.startsWith("benchmark")) continue;
    let s = bySeries.get(row.series);
    if (!s) {
      s = { label: row.series, points: [] };
      bySeries.set(row.series, s);
    }
    s.points.push({ x: row.axis_value, y: row[spec.metric] });
  }
  const series = [...bySeries.values()];
  for (const s of series) s.points.sort((a, b) => a.x - b.x);
  series.sort((a, b) => a.label.localeCompare(b.label));
  return {
    title: spec.title,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    series,
  };
}

function comparisonFigure(rows: ComparisonRow[]): Figure {
  const powerCaps = [...new Set(rows.map((r) => r.p_max_dbm))].sort(
    (a, b) => a - b,
  );
  const bySeries = new Map<string, Series>();
  for (const row of rows) {
    const label =
      powerCaps.length > 1
        ? `${row.scheme} (p_max=${row.p_max_dbm} dBm)`
        : row.scheme;
    let s = bySeries.get(label);
    if (!s) {
      s = { label, points: [] };
      bySeries.set(label, s);
    }
    s.points.push({ x: row.total_time_s, y: row.mean_energy_j });
  }
  const series = [...bySeries.values()];
  for (const s of series) s.points.sort((a, b) => a.x - b.x);
  series.sort((a, b) => a.label.localeCompare(b.label));
  return {
    title: "Energy vs. fixed completion time, by scheme",
    xLabel: "Maximum completion time (s)",
    yLabel: ENERGY,
    series,
  };
}

export function buildFigure(kind: FigureKind, csvText: string): Figure {
  if (kind === "comparison_fixed_t") {
    return comparisonFigure(parseComparisonCsv(csvText));
  }
  if (!(kind in SWEEP_KINDS)) {
    throw new SchemaError(
      `unknown figure kind '${kind}'; expected one of ${FIGURE_KINDS.join(", ")}`,
    );
  }
  return sweepFigure(kind, parseSweepCsv(csvText));
}
