/** CSV loading and schema checks for the simulator's output files. */

import * as fs from "fs";
import * as path from "path";
import Papa from "papaparse";

export type Row = Record<string, string | number | null>;

export class SchemaError extends Error {}

export const ROUNDS_COLUMNS = [
  "run_id", "round", "scheme", "uv_upper", "stage", "as_id", "ds_id",
  "g_attack", "g_defense", "aheu", "dheu", "attack_cost", "defense_cost",
  "attack_impact", "defense_impact", "tpr", "fpr", "compromised",
  "importance_fraction", "system_failure",
];

export const AGGREGATE_COLUMNS = [
  "scheme", "uv_upper", "metric", "mean", "stderr", "n_runs",
];

export function loadCsv(file: string, requiredColumns: string[]): Row[] {
  if (!fs.existsSync(file)) {
    throw new SchemaError(`input file not found: ${file}`);
  }
  const text = fs.readFileSync(file, "utf-8");
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const column of requiredColumns) {
    if (!fields.includes(column)) {
      throw new SchemaError(`${path.basename(file)}: missing column '${column}'`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path.basename(file)}: no data rows`);
  }
  return parsed.data;
}

export function requireColumn(rows: Row[], column: string, file: string): void {
  if (rows.length === 0 || !(column in rows[0])) {
    throw new SchemaError(`${file}: missing column '${column}'`);
  }
}

/** Distinct values of a column, in first-seen order. */
export function distinct(rows: Row[], column: string): (string | number | null)[] {
  const seen: (string | number | null)[] = [];
  for (const row of rows) {
    const value = row[column] ?? null;
    if (!seen.includes(value)) {
      seen.push(value);
    }
  }
  return seen;
}

export function asNumber(value: string | number | null): number {
  if (typeof value === "number") return value;
  if (value === null || value === "") return NaN;
  return Number(value);
}
