import Papa from "papaparse";

export class SchemaError extends Error {}

export interface SweepRow {
  axis: string;
  axis_value: number;
  series: string;
  mean_energy_j: number;
  mean_delay_s: number;
  mean_objective: number;
  solver_iters_mean: number;
  failures: number;
}

export interface ComparisonRow {
  scheme: string;
  total_time_s: number;
  p_max_dbm: number;
  mean_energy_j: number;
  failures: number;
}

export const SWEEP_COLUMNS = [
  "axis",
  "axis_value",
  "series",
  "mean_energy_j",
  "mean_delay_s",
  "mean_objective",
  "solver_iters_mean",
  "failures",
] as const;

export const COMPARISON_COLUMNS = [
  "scheme",
  "total_time_s",
  "p_max_dbm",
  "mean_energy_j",
  "failures",
] as const;

const SWEEP_NUMERIC: readonly string[] = [
  "axis_value",
  "mean_energy_j",
  "mean_delay_s",
  "mean_objective",
  "solver_iters_mean",
  "failures",
];

const COMPARISON_NUMERIC: readonly string[] = [
  "total_time_s",
  "p_max_dbm",
  "mean_energy_j",
  "failures",
];

function parseRows(
  text: string,
  columns: readonly string[],
  numeric: readonly string[],
): Record<string, string | number>[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`CSV parse error: ${first.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of columns) {
    if (!fields.includes(col)) {
      throw new SchemaError(`missing column '${col}'`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("CSV contains no data rows");
  }
  return parsed.data.map((raw, i) => {
    const row: Record<string, string | number> = {};
    for (const col of columns) {
      const value = raw[col];
      if (numeric.includes(col)) {
        const num = Number(value);
        if (!Number.isFinite(num)) {
          throw new SchemaError(
            `row ${i + 1}: column '${col}' is not a finite number (got '${value}')`,
          );
        }
        row[col] = num;
      } else {
        row[col] = value;
      }
    }
    return row;
  });
}

export function parseSweepCsv(text: string): SweepRow[] {
  return parseRows(text, SWEEP_COLUMNS, SWEEP_NUMERIC) as unknown as SweepRow[];
}

export function parseComparisonCsv(text: string): ComparisonRow[] {
  return parseRows(
    text,
    COMPARISON_COLUMNS,
    COMPARISON_NUMERIC,
  ) as unknown as ComparisonRow[];
}
