"""Command line interface.

Subcommands ``vcg``, ``optimize``, ``sweep``, ``simulate`` and ``ssa`` all read
a JSON scenario (see :mod:`spikeauction.scenario`).  Exit codes are stable:

    0  success
    2  scenario could not be parsed
    3  a domain invariant is violated
    4  the requested solver does not apply to the instance
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence, TextIO

from . import __version__
from .capacity import compute_kappa, price_of_capacity, threshold_index
from .core import CapacityParams, CoefficientVector, evaluate_objective, spikes_to_gaps
from .errors import InputError, SolverRegimeError, SpikeAuctionError, ValidationError
from .optimizer import LpSolution, dual_objective, solve, solve_closed_form, solve_simplex
from .scenario import Scenario, ScenarioParseError, load_scenario
from .sim import MIN_TRIALS_FOR_TEST, SIGMA_LEVEL, Scheme, simulate
from .spike_vcg import (
    efficiency_coefficients,
    revenue_coefficients,
    run_vcg,
    values_in_rank_order,
)
from .ssa import (
    combined_auction,
    fixed_revenue,
    ssa_objective_coefficients,
)

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_SOLVER = 0, 2, 3, 4


# ---------------------------------------------------------------- output


def _clean(obj: Any) -> Any:
    """JSON has no infinities; spell them out."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return str(value)


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return "(" + ", ".join(_short(v) for v in value) + ")"
    return _cell(value)


def write_csv(rows: Sequence[dict], stream: TextIO) -> None:
    if not rows:
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(rows[0].keys())
    for row in rows:
        writer.writerow(_cell(v) for v in row.values())


def write_table(rows: Sequence[dict], summary: dict, stream: TextIO) -> None:
    if rows:
        header = list(rows[0].keys())
        body = [[_short(r[k]) for k in header] for r in rows]
        widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(header)]
        stream.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
        stream.write("  ".join("-" * w for w in widths) + "\n")
        for b in body:
            stream.write("  ".join(c.rjust(w) for c, w in zip(b, widths)) + "\n")
    if summary:
        if rows:
            stream.write("\n")
        width = max(len(k) for k in summary)
        for key, value in summary.items():
            if isinstance(value, dict):
                value = ", ".join(f"{k}={_short(v)}" for k, v in value.items())
            stream.write(f"{key.ljust(width)}  {_short(value)}\n")


def emit(doc: dict, rows: Sequence[dict], summary: dict, fmt: str, output: str | None) -> None:
    buf = io.StringIO()
    if fmt == "json":
        buf.write(json.dumps(_clean(doc), indent=2) + "\n")
    elif fmt == "csv":
        write_csv(rows, buf)
    else:
        write_table(rows, summary, buf)
    if output:
        Path(output).write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(buf.getvalue())


# ---------------------------------------------------------------- helpers


def _require(value, what: str, command: str):
    if value is None:
        raise ValidationError(f"scenario has no {what!r}, which '{command}' needs", invariant=f"{what}-present")
    return value


def objective_coefficients(scenario: Scenario, objective: str, m: int) -> CoefficientVector:
    if objective == "ssa_revenue":
        config = _require(scenario.ssa, "ssa", "--objective ssa-revenue")
        if config.spike_count != m:
            raise InputError(f"ssa.spike_count is {config.spike_count} but epsilons has {m} entries")
        return ssa_objective_coefficients(scenario.bidders, config)
    if not scenario.bidders:
        raise InputError("at least one bidder is required")
    values = values_in_rank_order(scenario.bidders)
    if objective == "efficiency":
        return efficiency_coefficients(values, m)
    return revenue_coefficients(values, m)


def _solution_rows(d: CoefficientVector, eps: CapacityParams, sol: LpSolution) -> list[dict]:
    spikes = sol.spikes.probs
    return [
        {
            "j": j + 1,
            "coeff": d[j],
            "epsilon": eps[j],
            "gap": sol.gaps[j],
            "spike": spikes[j],
            "dual": sol.dual[j + 1],
        }
        for j in range(len(d))
    ]


# ---------------------------------------------------------------- commands


def cmd_vcg(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    spikes = _require(scenario.spikes, "spikes", "vcg")
    outcome = run_vcg(scenario.bidders, spikes)
    scheme = Scheme.parse(args.payment)
    charges = outcome.expected_payments if scheme is Scheme.BETTING else outcome.per_win_charges()
    utilities = outcome.utilities
    rows = []
    for j, p in enumerate(spikes.probs):
        holder = scenario.bidders[outcome.ranking[j]] if j < len(outcome.ranking) else None
        rows.append(
            {
                "rank": j + 1,
                "bidder": holder.id if holder else None,
                "value": holder.value if holder else 0.0,
                "spike": p,
                "expected_payment": outcome.expected_payments[j],
                "charge": charges[j],
                "utility": utilities[j],
            }
        )
    summary = {"payment": scheme.value, "revenue": outcome.revenue, "efficiency": outcome.efficiency}
    doc = {"command": "vcg", **summary, "ranks": rows}
    emit(doc, rows, summary, args.format, args.output)
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    eps = _require(scenario.epsilons, "epsilons", "optimize")
    objective = (args.objective or scenario.objective).replace("-", "_")
    d = objective_coefficients(scenario, objective, len(eps))
    if args.solver == "closed-form":
        sol = solve_closed_form(d, eps)
    elif args.solver == "simplex":
        sol = solve_simplex(d, eps)
    else:
        sol = solve(d, eps)

    summary: dict[str, Any] = {
        "objective": objective,
        "solver": sol.method,
        "gapwise_monotone": d.is_gapwise_monotone,
        "objective_value": sol.objective_value,
        "dual_objective": dual_objective(sol, eps),
        "dual_x0": sol.dual[0],
        "kkt_certified": sol.kkt_certified,
        "kappa": compute_kappa(eps),
    }
    if objective == "ssa_revenue":
        outcome = combined_auction(scenario.bidders, scenario.ssa, sol.spikes)
        summary["ssa_revenue"] = outcome.sne_revenue
    poc = None
    if args.poc:
        if d.is_gapwise_monotone and d[len(d) - 1] >= 0.0:
            poc = price_of_capacity(d, eps).as_dict()
        else:
            poc = {"kappa": compute_kappa(eps), "a_index": None, "nu": None,
                   "nu_upper_bound": None, "attained": None,
                   "note": "coefficients are not non-increasing and non-negative"}
        summary["price_of_capacity"] = poc
    rows = _solution_rows(d, eps, sol)
    doc = {"command": "optimize", **summary, "coeffs": list(d.coeffs), "gaps": list(sol.gaps),
           "spikes": list(sol.spikes.probs), "dual": list(sol.dual)}
    emit(doc, rows, summary, args.format, args.output)
    return EXIT_OK


def sweep_rows(d: CoefficientVector, m: int, eps_max: float, points: int) -> list[dict]:
    """Uniform lower bound on ranks ``1..m`` swept over ``[0, eps_max]``."""
    size = len(d)
    if not 1 <= m <= size:
        raise InputError(f"kappa must lie in 1..{size} (got {m})")
    if points < 2:
        raise InputError("a sweep needs at least two grid points")
    base = solve(d, CapacityParams.zeros(size)).objective_value
    rows = []
    for i in range(points):
        eps_value = eps_max * i / (points - 1)
        bounds = [eps_value] * m + [0.0] * (size - m)
        row = {"kappa": None, "epsilon": eps_value, "h_opt": None, "ratio": None, "status": "ok"}
        try:
            eps = CapacityParams(bounds)
        except ValidationError:
            row["status"] = "infeasible"
            rows.append(row)
            continue
        h = solve(d, eps).objective_value
        row["kappa"] = compute_kappa(eps)
        row["h_opt"] = h
        row["ratio"] = base / h if h > 0.0 else math.inf
        rows.append(row)
    return rows


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    objective = (args.objective or scenario.objective).replace("-", "_")
    if scenario.epsilons is not None:
        size = len(scenario.epsilons)
    elif objective == "ssa_revenue" and scenario.ssa is not None:
        size = scenario.ssa.spike_count
    else:
        size = args.spike_count or args.kappa or len(scenario.bidders)
    d = objective_coefficients(scenario, objective, size)
    m = args.kappa or threshold_index(d) or size
    eps_max = args.eps_max if args.eps_max is not None else 2.0 / (m * (m + 1))
    rows = sweep_rows(d, m, eps_max, args.points)
    feasible = [r["ratio"] for r in rows if r["status"] == "ok"]
    summary = {"objective": objective, "kappa_target": m, "coeffs": list(d.coeffs),
               "max_ratio": max(feasible) if feasible else None}
    if args.figure:
        from .report import plot_capacity_sweep

        plot_capacity_sweep(rows, args.figure, title=f"uniform bound on ranks 1..{m}")
        summary["figure"] = str(args.figure)
    doc = {"command": "sweep", **summary, "rows": rows}
    emit(doc, rows, summary, args.format, args.output)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    spikes = _require(scenario.spikes, "spikes", "simulate")
    result = simulate(scenario.bidders, spikes, args.payment, args.trials, args.seed, args.workers)
    low_power = result.trials < MIN_TRIALS_FOR_TEST
    rows = []
    for j in range(len(result.spikes)):
        dev = result.empirical_payment_means[j] - result.expected_payments[j]
        se = result.payment_standard_errors[j]
        freq = result.win_frequencies[j]
        fdev = freq - result.spikes[j]
        fse = result.frequency_standard_errors[j]
        ok = abs(dev) <= SIGMA_LEVEL * se and abs(fdev) <= SIGMA_LEVEL * fse
        rows.append(
            {
                "rank": j + 1,
                "spike": result.spikes[j],
                "expected_payment": result.expected_payments[j],
                "empirical_mean": result.empirical_payment_means[j],
                "deviation": dev,
                "std_error": se,
                "variance": result.empirical_payment_variances[j],
                "win_count": result.win_counts[j],
                "win_frequency": freq,
                "frequency_deviation": fdev,
                "status": "LOW-POWER" if low_power else ("PASS" if ok else "FAIL"),
            }
        )
    summary = {
        "payment": result.scheme.value,
        "trials": result.trials,
        "seed": result.seed,
        "generator": "numpy PCG64, SeedSequence(seed, spawn_key=(chunk,))",
        "empirical_revenue_mean": result.empirical_revenue_mean,
        "expected_revenue": math.fsum(result.expected_payments),
    }
    if args.figure:
        from .report import plot_simulation

        plot_simulation(result, args.figure)
        summary["figure"] = str(args.figure)
    doc = {"command": "simulate", **summary, "ranks": rows}
    emit(doc, rows, summary, args.format, args.output)
    return EXIT_OK


def cmd_ssa(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    config = _require(scenario.ssa, "ssa", "ssa")
    spikes = _require(scenario.spikes, "spikes", "ssa")
    outcome = combined_auction(scenario.bidders, config, spikes)
    d = ssa_objective_coefficients(scenario.bidders, config)
    h = evaluate_objective(spikes_to_gaps(spikes), d)
    fixed = fixed_revenue(scenario.bidders, config)
    rows = []
    for j, ctr in enumerate(outcome.effective_ctrs):
        holder = scenario.bidders[outcome.ranking[j]] if j < len(outcome.ranking) else None
        rows.append(
            {
                "position": j + 1,
                "bidder": holder.id if holder else None,
                "score": outcome.ranked_scores[j] if holder else 0.0,
                "effective_ctr": ctr,
                "price_per_click": outcome.per_slot_prices[j],
            }
        )
    summary = {
        "slots": config.slots,
        "spike_count": config.spike_count,
        "sne_revenue": outcome.sne_revenue,
        "fixed_revenue": fixed,
        "spike_objective": h,
        "objective_coefficients": list(d.coeffs),
        "gapwise_monotone": d.is_gapwise_monotone,
    }
    doc = {"command": "ssa", **summary, "positions": rows}
    emit(doc, rows, summary, args.format, args.output)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario JSON file")
    common.add_argument("--format", choices=("table", "csv", "json"), default=None)
    common.add_argument("--output", "-o", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="spikeauction", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vcg", parents=[common], help="run the VCG spike auction")
    p.add_argument("--payment", choices=("betting", "ppa"), default="betting")
    p.set_defaults(func=cmd_vcg, default_format="table")

    p = sub.add_parser("optimize", parents=[common], help="optimal spike gaps under capacity bounds")
    p.add_argument("--objective", choices=("revenue", "efficiency", "ssa-revenue"))
    p.add_argument("--solver", choices=("auto", "closed-form", "simplex"), default="auto")
    p.add_argument("--poc", action="store_true", help="include the price-of-capacity report")
    p.set_defaults(func=cmd_optimize, default_format="table")

    p = sub.add_parser("sweep", parents=[common], help="capacity vs optimal value trade-off")
    p.add_argument("--objective", choices=("revenue", "efficiency", "ssa-revenue"))
    p.add_argument("--kappa", type=int, help="uniform bound on ranks 1..kappa (default: threshold a)")
    p.add_argument("--spike-count", type=int, help="number of spikes when the scenario has no epsilons")
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--eps-max", type=float, help="grid upper end (default: feasibility cap)")
    p.add_argument("--figure", help="also render the trade-off curve to this image file")
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of expected payments")
    p.add_argument("--payment", choices=("betting", "ppa"), default="ppa")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--figure", help="also render empirical vs expected payments to this image file")
    p.set_defaults(func=cmd_simulate, default_format="table")

    p = sub.add_parser("ssa", parents=[common], help="combined sponsored-search auction")
    p.set_defaults(func=cmd_ssa, default_format="table")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except ScenarioParseError as exc:
        print(f"error: cannot parse scenario {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SolverRegimeError as exc:
        hint = " (try --solver simplex)" if getattr(args, "solver", None) == "closed-form" else ""
        print(f"error: {exc}{hint}", file=sys.stderr)
        return EXIT_SOLVER
    except ValidationError as exc:
        print(f"error: invariant '{exc.invariant}' violated: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SpikeAuctionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
