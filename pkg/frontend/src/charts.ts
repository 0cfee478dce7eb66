/** Chart construction: shapes CSV rows into echarts options and renders SVG.
 *
 * Chart kinds:
 *  - round_series: per-scheme mean of a metric over game rounds; only runs
 *    still alive at a round contribute (dead runs simply have no rows).
 *  - sweep_series: an aggregate metric against the vulnerability upper
 *    bound, one line per scheme.
 *  - bar_pair: aggregate bars (one group per sweep point, one bar per
 *    scheme), used for lifetime and detector quality.
 *  - strategy_probs: per-round frequency of each of the 8 strategies of one
 *    side, for one scheme.
 */

import * as fs from "fs";
import * as path from "path";
import * as echarts from "echarts";

import { Row, SchemaError, asNumber, distinct, requireColumn } from "./schema";

export type ChartKind = "round_series" | "sweep_series" | "bar_pair" | "strategy_probs";

export interface ChartSpec {
  kind: ChartKind;
  /** metric column (round_series/sweep_series/bar_pair) */
  metric: string;
  title: string;
  outFile: string;
  /** strategy_probs only: which side and scheme to plot */
  side?: "as" | "ds";
  scheme?: string;
}

const WIDTH = 760;
const HEIGHT = 480;

function groupBy(rows: Row[], column: string): Map<string, Row[]> {
  const groups = new Map<string, Row[]>();
  for (const row of rows) {
    const key = String(row[column] ?? "");
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(key, [row]);
    }
  }
  return groups;
}

function meanSeriesByRound(rows: Row[], metric: string): [number, number][] {
  const byRound = new Map<number, number[]>();
  for (const row of rows) {
    const t = asNumber(row["round"]);
    const v = asNumber(row[metric]);
    if (!byRound.has(t)) byRound.set(t, []);
    byRound.get(t)!.push(v);
  }
  return [...byRound.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([t, values]) => [t, values.reduce((s, v) => s + v, 0) / values.length]);
}

export function roundSeriesOption(rows: Row[], spec: ChartSpec) {
  requireColumn(rows, spec.metric, "rounds.csv");
  requireColumn(rows, "round", "rounds.csv");
  const series = [...groupBy(rows, "scheme").entries()].map(([scheme, group]) => ({
    name: scheme,
    type: "line" as const,
    showSymbol: false,
    data: meanSeriesByRound(group, spec.metric),
  }));
  return {
    title: { text: spec.title },
    legend: { top: 28 },
    xAxis: { type: "value" as const, name: "round" },
    yAxis: { type: "value" as const, name: spec.metric },
    series,
  };
}

function sweepLabel(value: string): string {
  return value === "" ? "default" : value;
}

export function sweepSeriesOption(rows: Row[], spec: ChartSpec) {
  requireColumn(rows, "metric", "aggregate.csv");
  const filtered = rows.filter((r) => r["metric"] === spec.metric);
  if (filtered.length === 0) {
    throw new SchemaError(`aggregate.csv: no rows for metric '${spec.metric}'`);
  }
  const points = distinct(filtered, "uv_upper").map((v) => String(v ?? ""));
  const series = [...groupBy(filtered, "scheme").entries()].map(([scheme, group]) => ({
    name: scheme,
    type: "line" as const,
    data: points.map((p) => {
      const row = group.find((r) => String(r["uv_upper"] ?? "") === p);
      return row ? asNumber(row["mean"]) : null;
    }),
  }));
  return {
    title: { text: spec.title },
    legend: { top: 28 },
    xAxis: {
      type: "category" as const,
      name: "vulnerability upper bound",
      data: points.map(sweepLabel),
    },
    yAxis: { type: "value" as const, name: spec.metric },
    series,
  };
}

export function barOption(rows: Row[], spec: ChartSpec) {
  requireColumn(rows, "metric", "aggregate.csv");
  const filtered = rows.filter((r) => r["metric"] === spec.metric);
  if (filtered.length === 0) {
    throw new SchemaError(`aggregate.csv: no rows for metric '${spec.metric}'`);
  }
  const points = distinct(filtered, "uv_upper").map((v) => String(v ?? ""));
  const series = [...groupBy(filtered, "scheme").entries()].map(([scheme, group]) => ({
    name: scheme,
    type: "bar" as const,
    data: points.map((p) => {
      const row = group.find((r) => String(r["uv_upper"] ?? "") === p);
      return row ? asNumber(row["mean"]) : null;
    }),
  }));
  return {
    title: { text: spec.title },
    legend: { top: 28 },
    xAxis: {
      type: "category" as const,
      name: "vulnerability upper bound",
      data: points.map(sweepLabel),
    },
    yAxis: { type: "value" as const, name: spec.metric },
    series,
  };
}

/** Per-round frequency of each strategy id among this scheme's alive runs. */
export function strategyFrequencies(
  rows: Row[],
  scheme: string,
  side: "as" | "ds",
): Map<number, [number, number][]> {
  const column = side === "as" ? "as_id" : "ds_id";
  const schemeRows = rows.filter((r) => r["scheme"] === scheme);
  if (schemeRows.length === 0) {
    throw new SchemaError(`rounds.csv: no rows for scheme '${scheme}'`);
  }
  const byRound = groupBy(schemeRows, "round");
  const result = new Map<number, [number, number][]>();
  for (let sid = 1; sid <= 8; sid++) {
    result.set(sid, []);
  }
  const rounds = [...byRound.keys()].map(Number).sort((a, b) => a - b);
  for (const t of rounds) {
    const group = byRound.get(String(t))!;
    for (let sid = 1; sid <= 8; sid++) {
      const count = group.filter((r) => asNumber(r[column]) === sid).length;
      result.get(sid)!.push([t, count / group.length]);
    }
  }
  return result;
}

export function strategyProbsOption(rows: Row[], spec: ChartSpec) {
  requireColumn(rows, spec.side === "as" ? "as_id" : "ds_id", "rounds.csv");
  const prefix = spec.side === "as" ? "AS" : "DS";
  const freqs = strategyFrequencies(rows, spec.scheme ?? "", spec.side ?? "as");
  const series = [...freqs.entries()].map(([sid, data]) => ({
    name: `${prefix}${sid}`,
    type: "line" as const,
    showSymbol: false,
    data,
  }));
  return {
    title: { text: spec.title },
    legend: { top: 28 },
    xAxis: { type: "value" as const, name: "round" },
    yAxis: { type: "value" as const, name: "frequency", max: 1 },
    series,
  };
}

export function buildOption(spec: ChartSpec, rows: Row[]) {
  switch (spec.kind) {
    case "round_series":
      return roundSeriesOption(rows, spec);
    case "sweep_series":
      return sweepSeriesOption(rows, spec);
    case "bar_pair":
      return barOption(rows, spec);
    case "strategy_probs":
      return strategyProbsOption(rows, spec);
  }
}

/** Rewrite zrender's process-global id counters (class and clip-path
 * tokens) so identical charts produce identical markup no matter how many
 * renders came before. */
export function normalizeSvg(svg: string): string {
  let out = svg;
  for (const pattern of [/zr\d+-cls-\d+/g, /zr\d+-c\d+/g]) {
    const mapping = new Map<string, string>();
    out = out.replace(pattern, (token) => {
      if (!mapping.has(token)) {
        const stem = token.includes("cls") ? "zr-cls-" : "zr-c";
        mapping.set(token, `${stem}${mapping.size}`);
      }
      return mapping.get(token)!;
    });
  }
  return out;
}

export function renderSvg(option: object): string {
  const chart = echarts.init(null as never, undefined, {
    renderer: "svg",
    ssr: true,
    width: WIDTH,
    height: HEIGHT,
  });
  try {
    chart.setOption({ animation: false, ...option });
    return normalizeSvg(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}

export function render(spec: ChartSpec, rows: Row[]): string {
  const svg = renderSvg(buildOption(spec, rows));
  fs.mkdirSync(path.dirname(spec.outFile), { recursive: true });
  fs.writeFileSync(spec.outFile, svg, "utf-8");
  return spec.outFile;
}
