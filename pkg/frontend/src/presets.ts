/** Preset catalogs: which charts each figure-style preset produces. */

import * as path from "path";

import { ChartSpec } from "./charts";
import { Row, distinct } from "./schema";

export type PresetName = "fig2" | "fig3" | "fig4" | "appendix";

export interface PresetChart {
  spec: ChartSpec;
  /** which input the chart reads */
  source: "rounds" | "aggregate";
}

export function presetCharts(
  preset: PresetName,
  outDir: string,
  roundsRows: Row[] | null,
): PresetChart[] {
  const out = (name: string) => path.join(outDir, name);
  switch (preset) {
    case "fig2":
      return [
        { source: "rounds", spec: { kind: "round_series", metric: "g_attack", title: "Attacker uncertainty", outFile: out("fig2a-attacker-uncertainty.svg") } },
        { source: "aggregate", spec: { kind: "sweep_series", metric: "mean_aheu", title: "Attacker HEU", outFile: out("fig2b-attacker-heu.svg") } },
        { source: "aggregate", spec: { kind: "sweep_series", metric: "mean_attack_cost", title: "Attack cost", outFile: out("fig2c-attack-cost.svg") } },
      ];
    case "fig3":
      return [
        { source: "rounds", spec: { kind: "round_series", metric: "g_defense", title: "Defender uncertainty", outFile: out("fig3a-defender-uncertainty.svg") } },
        { source: "aggregate", spec: { kind: "sweep_series", metric: "mean_dheu", title: "Defender HEU", outFile: out("fig3b-defender-heu.svg") } },
        { source: "aggregate", spec: { kind: "sweep_series", metric: "mean_defense_cost", title: "Defense cost", outFile: out("fig3c-defense-cost.svg") } },
      ];
    case "fig4":
      return [
        { source: "aggregate", spec: { kind: "bar_pair", metric: "mttsf", title: "Mean time to security failure", outFile: out("fig4a-mttsf.svg") } },
        { source: "aggregate", spec: { kind: "bar_pair", metric: "final_tpr", title: "Detector true-positive rate", outFile: out("fig4b-tpr.svg") } },
      ];
    case "appendix": {
      const charts: PresetChart[] = [
        { source: "rounds", spec: { kind: "round_series", metric: "attack_cost", title: "Attack cost per round", outFile: out("appendix-attack-cost.svg") } },
        { source: "rounds", spec: { kind: "round_series", metric: "aheu", title: "Attacker HEU per round", outFile: out("appendix-attacker-heu.svg") } },
        { source: "rounds", spec: { kind: "round_series", metric: "defense_cost", title: "Defense cost per round", outFile: out("appendix-defense-cost.svg") } },
        { source: "rounds", spec: { kind: "round_series", metric: "dheu", title: "Defender HEU per round", outFile: out("appendix-defender-heu.svg") } },
        { source: "rounds", spec: { kind: "round_series", metric: "tpr", title: "Detector true-positive rate per round", outFile: out("appendix-tpr.svg") } },
      ];
      const schemes = roundsRows
        ? distinct(roundsRows, "scheme").map(String)
        : [];
      for (const scheme of schemes) {
        charts.push({
          source: "rounds",
          spec: {
            kind: "strategy_probs", metric: "as_id", side: "as", scheme,
            title: `Attack strategy probabilities (${scheme})`,
            outFile: out(`appendix-attack-strategies-${scheme}.svg`),
          },
        });
        charts.push({
          source: "rounds",
          spec: {
            kind: "strategy_probs", metric: "ds_id", side: "ds", scheme,
            title: `Defense strategy probabilities (${scheme})`,
            outFile: out(`appendix-defense-strategies-${scheme}.svg`),
          },
        });
      }
      return charts;
    }
  }
}
