"""Experiment front end: flat key-value config files, figure presets, and
CSV emission (rounds.csv, summary.csv, aggregate.csv, plus an effective
config echo).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from dataclasses import dataclass, field, replace

from .engine import (
    SCHEMES,
    MonteCarloResult,
    SchemeConfig,
    monte_carlo,
)
from .topology import NetworkConfig

PRESETS = ("fig2", "fig3", "fig4", "appendix")

ROUNDS_COLUMNS = (
    "run_id", "round", "scheme", "uv_upper", "stage", "as_id", "ds_id",
    "g_attack", "g_defense", "aheu", "dheu", "attack_cost", "defense_cost",
    "attack_impact", "defense_impact", "tpr", "fpr", "compromised",
    "importance_fraction", "system_failure",
)

SUMMARY_COLUMNS = (
    "run_id", "seed", "scheme", "uv_upper", "mttsf", "censored",
    "final_tpr", "final_fpr", "mean_attack_cost", "mean_defense_cost",
    "mean_aheu", "mean_dheu",
    *(f"as{i}_freq" for i in range(1, 9)),
    *(f"ds{i}_freq" for i in range(1, 9)),
)

AGGREGATE_COLUMNS = ("scheme", "uv_upper", "metric", "mean", "stderr", "n_runs")


def _fraction(text: str) -> float:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _in_range(lo: float, hi: float):
    def check(key: str, value: float) -> None:
        if not lo <= value <= hi:
            raise ValueError(f"config key {key!r} must be in [{lo}, {hi}], got {value}")
    return check


def _positive(key: str, value: float) -> None:
    if value <= 0:
        raise ValueError(f"config key {key!r} must be positive, got {value}")


def _non_negative(key: str, value: float) -> None:
    if value < 0:
        raise ValueError(f"config key {key!r} must be >= 0, got {value}")


# key -> (parser, validator or None). One flat key per notation symbol.
CONFIG_KEYS: dict[str, tuple] = {
    "scheme": (str, None),
    "selection": (str, None),
    "heu_mode": (str, None),
    "lambda": (_fraction, _positive),
    "mu": (_fraction, _positive),
    "rho1": (_fraction, _in_range(0.0, 1.0)),
    "rho2": (_fraction, _in_range(0.0, 1.0)),
    "th_risk": (_fraction, _in_range(0.0, 1.0)),
    "th_c": (_fraction, _non_negative),
    "eps1": (_fraction, _in_range(0.0, 1.0)),
    "eps2": (_fraction, _in_range(0.0, 1.0)),
    "c_nt": (_fraction, _in_range(0.0, 100.0)),
    "p_fp": (_fraction, _in_range(0.0, 1.0)),
    "p_fn": (_fraction, _in_range(0.0, 1.0)),
    "p_r": (_fraction, _in_range(0.0, 1.0)),
    "nids_scale": (_fraction, _positive),
    "fp_sample": (int, _non_negative),
    "ad_min": (_fraction, _in_range(0.0, 1.0)),
    "ad_max": (_fraction, _in_range(0.0, 1.0)),
    "n_ws": (int, _non_negative),
    "n_db": (int, _non_negative),
    "n_iot": (int, _non_negative),
    "n_lh": (int, _non_negative),
    "n_hh": (int, _non_negative),
    "uv_upper": (int, _in_range(1, 10)),
    "round_cap": (int, _positive),
    "runs": (int, _positive),
    "seed": (int, None),
}


@dataclass
class ExperimentSpec:
    """One experiment: schemes x sweep points, run counts, output targets."""

    schemes: list[str]
    uv_sweep: list[int | None]
    n_runs: int
    master_seed: int
    out_dir: str
    base: SchemeConfig
    emit_rounds: bool = True
    emit_summary: bool = True
    emit_config_echo: bool = True


def load_config(path: str | None, overrides: dict[str, object]) -> dict[str, object]:
    """Read the flat key-value config file, apply overrides, and validate.
    Unknown keys are errors; thresholds accept exact fractions like 1/3."""
    values: dict[str, object] = {}
    if path is not None:
        if not os.path.exists(path):
            raise FileNotFoundError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, text = (part.strip() for part in line.split("=", 1))
                if key not in CONFIG_KEYS:
                    raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
                parser, validator = CONFIG_KEYS[key]
                value = parser(text)
                if validator is not None:
                    validator(key, value)
                values[key] = value
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        parser, validator = CONFIG_KEYS[key]
        if validator is not None and not isinstance(value, str):
            validator(key, value)
        values[key] = value
    return values


def build_config(values: dict[str, object]) -> SchemeConfig:
    """Materialize a SchemeConfig from validated flat keys."""
    net = NetworkConfig(
        n_ws=int(values.get("n_ws", 25)),
        n_db=int(values.get("n_db", 25)),
        n_iot=int(values.get("n_iot", 450)),
        n_lh=int(values.get("n_lh", 50)),
        n_hh=int(values.get("n_hh", 25)),
        p_r=float(values.get("p_r", 0.05)),
        vuln_upper=values.get("uv_upper"),
    )
    scheme = str(values.get("scheme", "dd-ipi"))
    if scheme == "all":
        scheme = "dd-ipi"  # placeholder; the experiment enumerates schemes
    selection = values.get("selection")
    return SchemeConfig(
        scheme=scheme,
        heu_mode=str(values.get("heu_mode", "random_fallback")),
        selection=str(selection) if selection else None,
        lam=float(values.get("lambda", 0.8)),
        mu=float(values.get("mu", 8.0)),
        rho1=float(values.get("rho1", 1.0 / 3.0)),
        rho2=float(values.get("rho2", 1.0 / 2.0)),
        th_risk=float(values.get("th_risk", 0.2)),
        th_c=float(values.get("th_c", 150.0)),
        eps1=float(values.get("eps1", 0.1)),
        eps2=float(values.get("eps2", 0.01)),
        c_nt=float(values.get("c_nt", 20.0)),
        p_fp0=float(values.get("p_fp", 0.01)),
        p_fn0=float(values.get("p_fn", 0.1)),
        nids_scale=float(values.get("nids_scale", 100.0)),
        fp_sample=int(values.get("fp_sample", 0)),
        ad_min=float(values.get("ad_min", 0.0)),
        ad_max=float(values.get("ad_max", 0.5)),
        network=net,
        round_cap=int(values.get("round_cap", 1000)),
        master_seed=int(values.get("seed", 2024)),
    )


def scaled_counts(n_legit: int) -> dict[str, int]:
    """Node counts at an arbitrary scale, keeping the full-scale proportions
    (5% web servers, 5% databases, 90% IoT; honeypots at 10% LH + 5% HH)."""
    n_ws = max(1, round(0.05 * n_legit))
    n_db = max(1, round(0.05 * n_legit))
    return {
        "n_ws": n_ws,
        "n_db": n_db,
        "n_iot": n_legit - n_ws - n_db,
        "n_lh": max(1, round(0.10 * n_legit)),
        "n_hh": max(1, round(0.05 * n_legit)),
    }


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.9g}"
    if value is None:
        return ""
    return str(value)


def _write_csv(path: str, columns: tuple[str, ...], rows: list[list[object]]) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _echo_fmt(value: object) -> str:
    # Full float precision so reloading the echo reproduces the parameters
    # exactly.
    if isinstance(value, float):
        return repr(value)
    return _fmt(value)


def _echo_config(path: str, spec: ExperimentSpec) -> None:
    """Write the effective configuration as loadable flat keys."""
    base = spec.base
    scheme = "all" if sorted(spec.schemes) == sorted(SCHEMES) else spec.schemes[0]
    lines = [
        f"# effective configuration, written {time.strftime('%Y-%m-%d %H:%M:%S')}",
        f"scheme = {scheme}",
        f"runs = {spec.n_runs}",
        f"seed = {spec.master_seed}",
        f"round_cap = {base.round_cap}",
        f"heu_mode = {base.heu_mode}",
        f"lambda = {_echo_fmt(base.lam)}",
        f"mu = {_echo_fmt(base.mu)}",
        f"rho1 = {_echo_fmt(base.rho1)}",
        f"rho2 = {_echo_fmt(base.rho2)}",
        f"th_risk = {_echo_fmt(base.th_risk)}",
        f"th_c = {_echo_fmt(base.th_c)}",
        f"eps1 = {_echo_fmt(base.eps1)}",
        f"eps2 = {_echo_fmt(base.eps2)}",
        f"c_nt = {_echo_fmt(base.c_nt)}",
        f"p_fp = {_echo_fmt(base.p_fp0)}",
        f"p_fn = {_echo_fmt(base.p_fn0)}",
        f"p_r = {_echo_fmt(base.network.p_r)}",
        f"nids_scale = {_echo_fmt(base.nids_scale)}",
        f"fp_sample = {base.fp_sample}",
        f"ad_min = {_echo_fmt(base.ad_min)}",
        f"ad_max = {_echo_fmt(base.ad_max)}",
        f"n_ws = {base.network.n_ws}",
        f"n_db = {base.network.n_db}",
        f"n_iot = {base.network.n_iot}",
        f"n_lh = {base.network.n_lh}",
        f"n_hh = {base.network.n_hh}",
    ]
    if base.selection is not None:
        lines.append(f"selection = {base.selection}")
    single_point = [u for u in spec.uv_sweep if u is not None]
    if len(spec.uv_sweep) == 1 and single_point:
        lines.append(f"uv_upper = {single_point[0]}")
    elif single_point:
        lines.append(
            "# uv sweep: " + ",".join(str(u) for u in single_point)
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def run_experiment(spec: ExperimentSpec) -> dict[tuple[str, int | None], MonteCarloResult]:
    """Execute every (scheme, sweep point) cell and write the CSV outputs."""
    os.makedirs(spec.out_dir, exist_ok=True)
    results: dict[tuple[str, int | None], MonteCarloResult] = {}
    rounds_rows: list[list[object]] = []
    summary_rows: list[list[object]] = []
    aggregate_rows: list[list[object]] = []

    for scheme in spec.schemes:
        for uv in spec.uv_sweep:
            cfg = replace(
                spec.base,
                scheme=scheme,
                network=replace(spec.base.network, vuln_upper=uv),
            )
            result = monte_carlo(cfg, spec.n_runs, spec.master_seed)
            results[(scheme, uv)] = result

            for summary in result.summaries:
                summary_rows.append([
                    summary.run_id, summary.seed, scheme, uv, summary.mttsf,
                    summary.censored, summary.final_tpr, summary.final_fpr,
                    summary.mean_attack_cost, summary.mean_defense_cost,
                    summary.mean_aheu, summary.mean_dheu,
                    *[float(x) for x in summary.as_freq],
                    *[float(x) for x in summary.ds_freq],
                ])
                if spec.emit_rounds and uv is None:
                    for r in summary.rounds:
                        rounds_rows.append([
                            r.run_id, r.round, r.scheme, uv, r.stage, r.as_id,
                            r.ds_id, r.g_attack, r.g_defense, r.aheu, r.dheu,
                            r.attack_cost, r.defense_cost, r.attack_impact,
                            r.defense_impact, r.tpr, r.fpr, r.compromised,
                            r.importance_fraction, r.system_failure,
                        ])
            for metric, (mean, stderr) in result.stats.items():
                aggregate_rows.append([scheme, uv, metric, mean, stderr, spec.n_runs])

            mean_mttsf, se_mttsf = result.stats["mttsf"]
            point = "default" if uv is None else f"uv={uv}"
            print(
                f"{scheme:>9} [{point}] runs={spec.n_runs} "
                f"mttsf={mean_mttsf:.1f}+/-{se_mttsf:.1f} "
                f"tpr={result.stats['final_tpr'][0]:.3f} "
                f"ac={result.stats['mean_attack_cost'][0]:.3f} "
                f"dc={result.stats['mean_defense_cost'][0]:.3f}"
            )

    try:
        if spec.emit_rounds:
            _write_csv(os.path.join(spec.out_dir, "rounds.csv"), ROUNDS_COLUMNS, rounds_rows)
        if spec.emit_summary:
            _write_csv(os.path.join(spec.out_dir, "summary.csv"), SUMMARY_COLUMNS, summary_rows)
        _write_csv(os.path.join(spec.out_dir, "aggregate.csv"), AGGREGATE_COLUMNS, aggregate_rows)
        if spec.emit_config_echo:
            _echo_config(os.path.join(spec.out_dir, "effective-config.txt"), spec)
    except OSError as exc:
        print(f"error: failed writing outputs: {exc}", file=sys.stderr)
        raise
    return results


def _preset_spec(name: str, spec: ExperimentSpec) -> ExperimentSpec:
    if name in ("fig2", "fig3"):
        return replace(spec, schemes=list(SCHEMES), uv_sweep=[None, 3, 5, 7, 9])
    if name == "fig4":
        return replace(spec, schemes=list(SCHEMES), uv_sweep=[3, 5, 7, 9], emit_rounds=False)
    if name == "appendix":
        return replace(spec, schemes=list(SCHEMES), uv_sweep=[None])
    raise ValueError(f"unknown preset {name!r}")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypersim",
        description="Seeded attacker-defender hypergame simulation experiments.",
    )
    parser.add_argument("--config", metavar="PATH", help="flat key-value config file")
    parser.add_argument("--scheme", choices=(*SCHEMES, "all"), default=None)
    parser.add_argument("--runs", type=int, default=None, metavar="N")
    parser.add_argument("--seed", type=int, default=None, metavar="N")
    parser.add_argument("--nodes", type=int, default=None, metavar="N",
                        help="legitimate node count; other counts scale proportionally")
    parser.add_argument("--uv-upper", type=int, default=None, metavar="X",
                        help="software-vulnerability upper bound override")
    parser.add_argument("--preset", choices=PRESETS, default=None)
    parser.add_argument("--out", default="results", metavar="DIR")
    parser.add_argument("--round-cap", type=int, default=None, metavar="N")
    parser.add_argument(
        "--selection",
        choices=("argmax", "proportional", "smoothed", "dirichlet"),
        default=None,
        help="override the informed-play policy for both players",
    )
    parser.add_argument("--heu-mode",
                        choices=("random-fallback", "pessimistic"), default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)

    overrides: dict[str, object] = {
        "runs": args.runs,
        "seed": args.seed,
        "round_cap": args.round_cap,
        "selection": args.selection,
        "heu_mode": args.heu_mode.replace("-", "_") if args.heu_mode else None,
        "uv_upper": args.uv_upper,
    }
    if args.scheme is not None:
        overrides["scheme"] = args.scheme
    if args.nodes is not None:
        overrides.update(scaled_counts(args.nodes))

    try:
        values = load_config(args.config, overrides)
        base = build_config(values)
    except (FileNotFoundError, ValueError) as exc:
        parser.error(str(exc))

    requested = str(values.get("scheme", "dd-ipi"))
    schemes = list(SCHEMES) if requested == "all" else [requested]
    spec = ExperimentSpec(
        schemes=schemes,
        uv_sweep=[values.get("uv_upper")],
        n_runs=int(values.get("runs", 10)),
        master_seed=int(values.get("seed", 2024)),
        out_dir=args.out,
        base=base,
    )
    if args.preset is not None:
        spec = _preset_spec(args.preset, spec)

    try:
        run_experiment(spec)
    except OSError:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
