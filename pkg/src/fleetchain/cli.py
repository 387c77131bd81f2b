"""Command-line front end: analytics tables, paired simulations, validation.

Exit codes: 0 success, 1 configuration error, 2 validation failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import replace
from pathlib import Path

from scipy import integrate

from .analytics import (
    InfeasibleRateError,
    energy_decay,
    invert_rate,
    transaction_count,
)
from .scenario import ConfigError, Scenario, expand, load_scenario
from .sim import Comparison, comparison_csv, paired_comparison
from .validate import run_validation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


def _write(path: Path, text: str) -> None:
    path.write_text(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _tx_oracle_ceil(txp) -> int:
    """Ceiling of the numerically integrated load model."""
    total_rate = txp.total_rate()

    def integrand(x, t):
        z = (x - txp.mean_range) / txp.range_stddev
        f = math.exp(-0.5 * z * z) / (txp.range_stddev * math.sqrt(2.0 * math.pi))
        return f * txp.presence * total_rate * t / txp.parallel_links

    value, _ = integrate.dblquad(
        integrand, 0.0, txp.horizon, 0.0, txp.radio_range, epsabs=1e-11, epsrel=1e-12
    )
    return math.ceil(value)


def cmd_analytics(scenario: Scenario, out_dir: Path) -> int:
    """Closed-form values next to their quadrature oracles, per sweep point.

    Infeasible rows (negative radicands) are reported and the run continues.
    """
    header = [
        "label",
        "decay_closed_J",
        "decay_oracle_J",
        "decay_rel_err",
        "txcount_as_derived",
        "txcount_as_printed",
        "txcount_oracle_ceil",
        "note",
    ]
    rows = []
    for label, cfg in expand(scenario):
        note = ""
        try:
            p = cfg.decay_params()
            lam = invert_rate(p.rate1) + invert_rate(p.rate2)
            closed = energy_decay(p)
            oracle, _ = integrate.quad(
                lambda t: math.exp(-lam * t), 0.0, p.horizon, epsabs=1e-14, epsrel=1e-13
            )
            oracle *= p.initial_energy / p.app_count
            rel = abs(closed - oracle) / max(abs(oracle), 1e-300)
            decay_cells = [repr(closed), repr(oracle), f"{rel:.3e}"]
        except InfeasibleRateError as exc:
            decay_cells = ["", "", ""]
            note = f"decay infeasible: {exc}"
        txp = cfg.tx_count_params()
        derived = transaction_count(replace(txp, variant="as-derived"))
        printed = transaction_count(replace(txp, variant="as-printed"))
        rows.append([label or "-"] + decay_cells + [derived, printed, _tx_oracle_ceil(txp), note])
    text = _csv_text(header, rows)
    _write(out_dir / f"analytics_{scenario.name}.csv", text)
    print(text, end="")
    return EXIT_OK


def _summary_lines(name: str, results: list[tuple[str, Comparison]]) -> list[str]:
    lines = [f"scenario: {name}", ""]
    for label, comp in results:
        lines.append(
            f"[{label or 'single'}] transactions: baseline="
            f"{comp.baseline.transactions_total:g} clustered="
            f"{comp.clustered.transactions_total:g} reduction="
            f"{comp.tx_reduction_pct:.2f}%"
        )
        lines.append(
            f"[{label or 'single'}] energy: baseline={comp.baseline.energy_total:g} J "
            f"clustered={comp.clustered.energy_total:g} J "
            f"reduction={comp.energy_reduction_pct:.2f}% "
            f"conservation_factor={comp.conservation_factor_pct:.2f}%"
        )
    if results:
        n = len(results)
        lines.append("")
        lines.append(
            "averages: tx_reduction="
            f"{sum(c.tx_reduction_pct for _, c in results) / n:.2f}% "
            f"energy_reduction={sum(c.energy_reduction_pct for _, c in results) / n:.2f}% "
            f"conservation_factor={sum(c.conservation_factor_pct for _, c in results) / n:.2f}%"
        )
    lines.append("")
    lines.append("modelling assumptions (the headline percentages depend on these):")
    for item in results[0][1].assumptions if results else ():
        lines.append(f"  - {item}")
    lines.append("")
    return lines


def cmd_simulate(scenario: Scenario, out_dir: Path) -> int:
    """Paired baseline/clustered runs per sweep point; CSV + summary output."""
    results: list[tuple[str, Comparison]] = []
    for label, cfg in expand(scenario):
        comp = paired_comparison(cfg)
        results.append((label, comp))
        suffix = f"_{label}" if label else ""
        _write(out_dir / f"comparison_{scenario.name}{suffix}.csv", comparison_csv(comp))

    # Transactions-vs-time across both regimes, stacked over sweep points.
    tx_rows = []
    for label, comp in results:
        for b, c in zip(comp.baseline.rows, comp.clustered.rows):
            tx_rows.append(
                [label or "-", f"{b.t:g}", f"{b.transactions_cum:g}", f"{c.transactions_cum:g}"]
            )
    _write(
        out_dir / f"fig_transactions_{scenario.name}.csv",
        _csv_text(["point", "t", "baseline_transactions", "clustered_transactions"], tx_rows),
    )

    # Conservation-vs-sweep-point.
    cons_rows = [
        [
            label or "-",
            f"{comp.conservation_factor_pct:.4f}",
            f"{comp.energy_reduction_pct:.4f}",
            f"{comp.tx_reduction_pct:.4f}",
        ]
        for label, comp in results
    ]
    _write(
        out_dir / f"fig_conservation_{scenario.name}.csv",
        _csv_text(
            ["point", "conservation_factor_pct", "sim_energy_reduction_pct", "sim_tx_reduction_pct"],
            cons_rows,
        ),
    )

    summary = "\n".join(_summary_lines(scenario.name, results))
    _write(out_dir / f"summary_{scenario.name}.txt", summary)
    print(summary, end="")
    return EXIT_OK


def cmd_validate(tolerance: float, grid: int, seed: int) -> int:
    report = run_validation(tolerance=tolerance, grid=grid, seed=seed)
    for line in report.lines():
        print(line)
    if not report.passed:
        print(f"validation failed: {report.failures} value(s) out of tolerance")
        return EXIT_VALIDATION
    print("validation passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fleetchain",
        description="Analytics and paired simulations for clustered ledger fleets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analytics = sub.add_parser("analytics", help="closed forms vs oracles")
    p_analytics.add_argument("--config", required=True)
    p_analytics.add_argument("--out", default="results")
    p_analytics.add_argument("--variant", choices=["as-printed", "as-derived"])
    p_analytics.add_argument("--seed", type=int)

    p_sim = sub.add_parser("simulate", help="paired baseline/clustered runs")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default="results")
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--variant", choices=["as-printed", "as-derived"])

    p_val = sub.add_parser("validate", help="run the numerical oracle suite")
    p_val.add_argument("--tolerance", type=float, default=1e-9)
    p_val.add_argument("--grid", type=int, default=100)
    p_val.add_argument("--seed", type=int, default=20240)
    return parser


def _prepare_out(path_str: str) -> Path:
    out = Path(path_str)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    probe.write_text("")
    probe.unlink()
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.tolerance, args.grid, args.seed)
        scenario = load_scenario(args.config)
        if args.seed is not None:
            scenario = replace(scenario, config=replace(scenario.config, seed=args.seed))
        if args.variant is not None:
            scenario = replace(
                scenario,
                variant=args.variant,
                config=replace(scenario.config, formula_variant=args.variant),
            )
        out_dir = _prepare_out(args.out if args.out else (scenario.output or "results"))
        if args.command == "analytics":
            return cmd_analytics(scenario, out_dir)
        return cmd_simulate(scenario, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
