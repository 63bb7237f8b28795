"""Command line for the market simulator.

Five subcommands: ``generate`` writes a scenario file, ``run`` executes
one method on one scenario, ``compare`` races all methods over seeded
batches, ``audit`` checks the economic properties, ``bench`` measures
runtimes. Exit code 0 on success, 1 when an audit finds violations, 2 on
usage errors.

Output files have fixed names inside ``--out-dir`` so a rerun with the
same seed overwrites them with identical bytes (timing files excepted;
wall-clock measurements are never deterministic).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .baselines import FogaConfig
from .harness import (
    AUDIT_KINDS,
    DEFAULT_VCG_CAP,
    METHODS,
    bench,
    compare,
    run_audit,
    run_method,
    write_audit_json,
    write_bench_csv,
    write_comparison_csv,
    write_outcome_json,
    write_timing_csv,
    write_trial_records,
    write_winner_table,
)
from .scenario import (
    GenParams,
    ScenarioFormatError,
    ScenarioValidationError,
    generate,
    load,
    save,
)

__all__ = ["main", "build_parser"]


def _size(text: str) -> tuple[int, int, int]:
    parts = text.split("/")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"size must look like L/M/N, got {text!r}")
    try:
        size = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must be three integers, got {text!r}")
    if min(size) < 1:
        raise argparse.ArgumentTypeError(f"sizes must be >= 1, got {text!r}")
    return size  # type: ignore[return-value]


def _add_distribution_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("scenario distribution")
    g.add_argument("--data-size-range", nargs=2, type=float, metavar=("LOW", "HIGH"),
                   help="normalized data units offered per seller (default 10 30)")
    g.add_argument("--data-unit-scale", type=float, metavar="X",
                   help="raw samples per normalized unit (default 500)")
    g.add_argument("--unit-cost-range", nargs=2, type=float, metavar=("LOW", "HIGH"),
                   help="data cost per raw sample (default 0.0002 0.0004)")
    g.add_argument("--distance-range", nargs=2, type=float, metavar=("LOW", "HIGH"),
                   help="flight distance (default 10 100)")
    g.add_argument("--unit-fly-cost-range", nargs=2, type=float, metavar=("LOW", "HIGH"),
                   help="flight cost per distance unit (default 0.02 0.05)")
    g.add_argument("--model-size-range", nargs=2, type=float, metavar=("LOW", "HIGH"),
                   help="model size in KB (default 100 500)")
    g.add_argument("--rate-range", nargs=2, type=float, metavar=("LOW", "HIGH"),
                   help="transfer rate in KB/s (default 100 300)")
    g.add_argument("--alpha1-range", nargs=2, type=float, metavar=("LOW", "HIGH"),
                   help="valuation scale factor (default 8 12)")
    g.add_argument("--alpha2", type=float, metavar="X",
                   help="valuation log shape (default 1)")
    g.add_argument("--required-data", type=float, metavar="X",
                   help="samples each buyer requires (default 5000)")
    g.add_argument("--untruthful", action="store_true",
                   help="perturb bids away from true costs")
    g.add_argument("--untruthful-factor-range", nargs=2, type=float,
                   metavar=("LOW", "HIGH"),
                   help="bid perturbation factors (default 0.8 1.2)")


def _gen_params(args: argparse.Namespace, size: tuple[int, int, int], seed: int) -> GenParams:
    """GenParams from parsed flags; unset flags keep the defaults."""
    params = GenParams(*size, seed=seed)
    overrides: dict = {}
    for name in ("data_size_range", "unit_cost_range", "distance_range",
                 "unit_fly_cost_range", "model_size_range", "rate_range",
                 "alpha1_range", "untruthful_factor_range"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = (float(value[0]), float(value[1]))
    for name in ("data_unit_scale", "alpha2", "required_data"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = float(value)
    if getattr(args, "untruthful", False):
        overrides["truthful"] = False
    return dataclasses.replace(params, **overrides)


def _add_foga_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("genetic-algorithm baseline")
    g.add_argument("--foga-config", metavar="PATH",
                   help="JSON file with FogaConfig fields; explicit flags override it")
    g.add_argument("--foga-population", type=int, metavar="N")
    g.add_argument("--foga-generations", type=int, metavar="N")
    g.add_argument("--foga-crossover", type=float, metavar="RATE")
    g.add_argument("--foga-mutation", type=float, metavar="RATE")
    g.add_argument("--foga-passes", type=int, metavar="N",
                   help="fragment-repair passes per generation")


def _foga_config(args: argparse.Namespace) -> FogaConfig:
    cfg = FogaConfig()
    path = getattr(args, "foga_config", None)
    if path:
        doc = json.loads(Path(path).read_text())
        if not isinstance(doc, dict):
            raise ValueError(f"{path}: FOGA config must be a JSON object")
        known = {f.name for f in dataclasses.fields(FogaConfig)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError(f"{path}: unknown FOGA config fields {unknown}")
        cfg = dataclasses.replace(cfg, **doc)
    flag_map = {
        "foga_population": "population_size",
        "foga_generations": "generations",
        "foga_crossover": "crossover_rate",
        "foga_mutation": "mutation_rate",
        "foga_passes": "fragment_passes",
    }
    overrides = {}
    for flag, field in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    cfg.validate()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flmarket",
        description="Reverse-auction mechanisms for a drone-assisted data market.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="draw a random scenario and save it")
    p_gen.add_argument("--buyers", type=int, required=True, metavar="L")
    p_gen.add_argument("--data-sellers", type=int, required=True, metavar="M")
    p_gen.add_argument("--uav-sellers", type=int, required=True, metavar="N")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, metavar="PATH",
                       help="scenario JSON file to write")
    _add_distribution_flags(p_gen)

    p_run = sub.add_parser("run", help="run one method on one scenario")
    p_run.add_argument("--method", choices=METHODS, required=True)
    p_run.add_argument("--scenario", metavar="PATH",
                       help="scenario JSON file; omit to generate from flags")
    p_run.add_argument("--buyers", type=int, metavar="L")
    p_run.add_argument("--data-sellers", type=int, metavar="M")
    p_run.add_argument("--uav-sellers", type=int, metavar="N")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--rsbm-seed", type=int, default=0,
                       help="tie-break seed for the random-selection baseline")
    p_run.add_argument("--vcg-cap", type=_size, default=DEFAULT_VCG_CAP, metavar="L/M/N",
                       help="refuse exact solves above this size (default 6/6/6)")
    p_run.add_argument("--out-dir", default=".", metavar="DIR",
                       help="where winners.csv and outcome.json go (default .)")
    _add_distribution_flags(p_run)
    _add_foga_flags(p_run)

    p_cmp = sub.add_parser("compare", help="race every method over seeded batches")
    p_cmp.add_argument("--sizes", nargs="+", type=_size, required=True, metavar="L/M/N")
    p_cmp.add_argument("--trials", type=int, default=100)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--vcg-cap", type=_size, default=DEFAULT_VCG_CAP, metavar="L/M/N",
                       help="skip the exact method above this size (default 6/6/6)")
    p_cmp.add_argument("--workers", type=int, default=1,
                       help="worker processes for trials (default 1)")
    p_cmp.add_argument("--out-dir", default=".", metavar="DIR",
                       help="where compare.csv, compare_timing.csv, trials.csv go")
    _add_distribution_flags(p_cmp)
    _add_foga_flags(p_cmp)

    p_aud = sub.add_parser("audit", help="check truthfulness, rationality, stability")
    p_aud.add_argument("--kind", choices=AUDIT_KINDS, required=True)
    p_aud.add_argument("--scenarios", type=int, default=100)
    p_aud.add_argument("--size", type=_size, default=(4, 4, 4), metavar="L/M/N")
    p_aud.add_argument("--grid", type=int, default=21,
                       help="points in the bid-deviation grid (default 21)")
    p_aud.add_argument("--seed", type=int, default=0)
    p_aud.add_argument("--mechanism", choices=("vcg", "matching", "both"),
                       default="both")
    p_aud.add_argument("--workers", type=int, default=1,
                       help="worker processes for scenarios (default 1)")
    p_aud.add_argument("--out", metavar="PATH",
                       help="also write the report as JSON")

    p_bench = sub.add_parser("bench", help="measure wall-clock runtime per method")
    p_bench.add_argument("--sizes", nargs="+", type=_size, required=True, metavar="L/M/N")
    p_bench.add_argument("--trials", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p_bench.add_argument("--vcg-cap", type=_size, default=DEFAULT_VCG_CAP, metavar="L/M/N")
    p_bench.add_argument("--vcg-budget", type=float, default=60.0,
                         help="stop timing the exact method at a size once it has "
                              "used this many seconds (default 60)")
    p_bench.add_argument("--out-dir", default=".", metavar="DIR",
                         help="where bench.csv goes (default .)")
    _add_foga_flags(p_bench)

    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    size = (args.buyers, args.data_sellers, args.uav_sellers)
    if min(size) < 1:
        raise ValueError("market sizes must all be >= 1")
    scenario = generate(_gen_params(args, size, args.seed))
    save(scenario, args.out)
    print(f"wrote {args.out}: {size[0]} buyers, {size[1]} data sellers, "
          f"{size[2]} uav sellers, seed {args.seed}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    if args.scenario:
        scenario = load(args.scenario)
    else:
        missing = [flag for flag, value in (("--buyers", args.buyers),
                                            ("--data-sellers", args.data_sellers),
                                            ("--uav-sellers", args.uav_sellers))
                   if value is None]
        if missing:
            raise ValueError(
                f"without --scenario, {' '.join(missing)} must be given"
            )
        size = (args.buyers, args.data_sellers, args.uav_sellers)
        if min(size) < 1:
            raise ValueError("market sizes must all be >= 1")
        scenario = generate(_gen_params(args, size, args.seed))
    size = (scenario.n_buyers, scenario.n_data_sellers, scenario.n_uav_sellers)
    if args.method == "vcg" and any(s > c for s, c in zip(size, args.vcg_cap)):
        raise ValueError(
            f"scenario size {size[0]}/{size[1]}/{size[2]} exceeds the exact-solver "
            f"cap {args.vcg_cap[0]}/{args.vcg_cap[1]}/{args.vcg_cap[2]}; "
            "raise --vcg-cap to force it"
        )
    outcome = run_method(args.method, scenario,
                         rsbm_seed=args.rsbm_seed, foga_config=_foga_config(args))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_winner_table(out_dir / "winners.csv", scenario, outcome)
    write_outcome_json(out_dir / "outcome.json", scenario, outcome, args.method)
    print(f"{args.method}: objective {outcome.objective!r}, "
          f"{len(outcome.allocation.triples)} winners, "
          f"wrote {out_dir / 'winners.csv'} and {out_dir / 'outcome.json'}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise ValueError(f"--trials must be >= 1, got {args.trials}")
    params = _gen_params(args, (1, 1, 1), args.seed)
    report = compare(
        sizes=args.sizes,
        trials=args.trials,
        seed=args.seed,
        params=params,
        vcg_cap=args.vcg_cap,
        foga_config=_foga_config(args),
        workers=args.workers,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_comparison_csv(out_dir / "compare.csv", report)
    write_timing_csv(out_dir / "compare_timing.csv", report)
    write_trial_records(out_dir / "trials.csv", report)
    for row in report.rows:
        gap = "" if row.mean_relative_gap is None else f" gap {row.mean_relative_gap:.4f}"
        win = "" if row.win_rate_vs_exact is None else f" win {row.win_rate_vs_exact:.2f}"
        print(f"{row.size[0]}/{row.size[1]}/{row.size[2]} {row.method:8s} "
              f"mean objective {row.mean_objective:.4f}{win}{gap}")
    print(f"wrote {out_dir / 'compare.csv'}, {out_dir / 'compare_timing.csv'}, "
          f"{out_dir / 'trials.csv'}")
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    if args.scenarios < 1:
        raise ValueError(f"--scenarios must be >= 1, got {args.scenarios}")
    if args.grid < 2:
        raise ValueError(f"--grid must be >= 2, got {args.grid}")
    mechanisms = ("vcg", "matching") if args.mechanism == "both" else (args.mechanism,)
    report = run_audit(
        kind=args.kind,
        n_scenarios=args.scenarios,
        size=args.size,
        grid=args.grid,
        seed=args.seed,
        mechanisms=mechanisms,
        workers=args.workers,
    )
    if args.out:
        write_audit_json(args.out, report)
    for violation in report.violations:
        print(violation.describe())
    verdict = "PASS" if report.passed else f"FAIL ({len(report.violations)} violations)"
    print(f"{report.kind}: {report.scenarios_tested} scenarios, "
          f"{report.checks_tested} checks, {verdict}")
    return 0 if report.passed else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise ValueError(f"--trials must be >= 1, got {args.trials}")
    rows = bench(
        sizes=args.sizes,
        trials=args.trials,
        seed=args.seed,
        methods=tuple(args.methods),
        vcg_cap=args.vcg_cap,
        vcg_budget=args.vcg_budget,
        foga_config=_foga_config(args),
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_bench_csv(out_dir / "bench.csv", rows)
    for row in rows:
        if row.trials:
            print(f"{row.size[0]}/{row.size[1]}/{row.size[2]} {row.method:8s} "
                  f"mean {row.mean_elapsed:.6f}s std {row.std_elapsed:.6f}s "
                  f"({row.trials} trials, {row.status})")
        else:
            print(f"{row.size[0]}/{row.size[1]}/{row.size[2]} {row.method:8s} {row.status}")
    print(f"wrote {out_dir / 'bench.csv'}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "run": _cmd_run,
        "compare": _cmd_compare,
        "audit": _cmd_audit,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except (ScenarioFormatError, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
