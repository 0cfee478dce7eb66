/** Chart generation entry point.
 *
 * Usage: node dist/cli.js --input DIR --preset fig2|fig3|fig4|appendix --out DIR
 *
 * Reads the simulator's rounds.csv / aggregate.csv from --input and writes
 * one SVG per paper-style panel into --out. Inputs are never modified;
 * reruns overwrite the outputs.
 */

import * as path from "path";

import { render } from "./charts";
import { presetCharts, PresetName } from "./presets";
import { AGGREGATE_COLUMNS, ROUNDS_COLUMNS, Row, SchemaError, loadCsv } from "./schema";

const PRESETS: PresetName[] = ["fig2", "fig3", "fig4", "appendix"];

interface Args {
  input: string;
  preset: PresetName;
  out: string;
}

export function parseArgs(argv: string[]): Args {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`bad argument: ${flag}`);
    }
    values[flag.slice(2)] = value;
  }
  const input = values["input"];
  const preset = values["preset"] as PresetName;
  const out = values["out"];
  if (!input || !preset || !out) {
    throw new Error("usage: --input DIR --preset fig2|fig3|fig4|appendix --out DIR");
  }
  if (!PRESETS.includes(preset)) {
    throw new Error(`unknown preset '${preset}'`);
  }
  return { input, preset, out };
}

export function generate(args: Args): string[] {
  const charts = presetCharts(
    args.preset,
    args.out,
    null, // resolved below once rounds.csv is loaded (appendix needs schemes)
  );
  const needsRounds =
    charts.some((c) => c.source === "rounds") || args.preset === "appendix";
  const roundsRows: Row[] | null = needsRounds
    ? loadCsv(path.join(args.input, "rounds.csv"), ROUNDS_COLUMNS)
    : null;
  const needsAggregate = charts.some((c) => c.source === "aggregate");
  const aggregateRows: Row[] | null = needsAggregate
    ? loadCsv(path.join(args.input, "aggregate.csv"), AGGREGATE_COLUMNS)
    : null;

  const resolved = presetCharts(args.preset, args.out, roundsRows);
  const written: string[] = [];
  for (const chart of resolved) {
    const rows = chart.source === "rounds" ? roundsRows! : aggregateRows!;
    written.push(render(chart.spec, rows));
  }
  return written;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const written = generate(args);
    for (const file of written) {
      console.log(`wrote ${file}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
