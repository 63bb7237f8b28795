"""Experiment driver: method dispatch, comparisons, benchmarks, reports.

Ties the mechanisms and baselines to a uniform ``(scenario) -> outcome``
interface and runs seeded batches over them. Everything written to disk
is regenerable: every row carries the scenario seed and the generation
parameters that produced it.

Wall-clock measurements never enter the deterministic artifacts. Method
comparison writes objectives, win rates and gaps to one CSV and runtimes
to a separate timing CSV; benchmark output is timing by definition. With
a fixed seed the non-timing files are byte-identical across runs.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audits import (
    AuditReport,
    default_mechanisms,
    derive_seed,
    individual_rationality_audit,
    stability_audit,
    truthfulness_audit,
)
from .baselines import FogaConfig, run_foga, run_hvpm, run_lcpm, run_rsbm
from .market import AuctionOutcome, Scenario
from .matching import run_matching
from .pairing import build_joint_bids
from .scenario import GenParams, generate
from .vcg import empty_payments, run_vcg
from .wdp import Allocation

__all__ = [
    "METHODS",
    "AUDIT_KINDS",
    "DEFAULT_VCG_CAP",
    "derive_seed",
    "run_method",
    "MethodRow",
    "TrialRecord",
    "ComparisonReport",
    "compare",
    "run_audit",
    "write_audit_json",
    "BenchRow",
    "bench",
    "write_winner_table",
    "read_winner_table",
    "write_outcome_json",
    "write_comparison_csv",
    "read_comparison_csv",
    "write_timing_csv",
    "write_trial_records",
    "read_trial_records",
    "write_bench_csv",
    "read_bench_csv",
]

METHODS = ("vcg", "matching", "hvpm", "lcpm", "rsbm", "foga")

# exact solves above this (L, M, N) are skipped instead of left to hang
DEFAULT_VCG_CAP = (6, 6, 6)


def _unpriced_outcome(
    scenario: Scenario, allocation: Allocation, elapsed: float
) -> AuctionOutcome:
    """Outcome wrapper for methods that only allocate and never price."""
    buyer_rev = [0.0] * scenario.n_buyers
    for (l, m, n) in allocation.sorted_triples():
        v = scenario.buyers[l].valuations[m][n]
        buyer_rev[l] = v - scenario.joint_bid(l, m, n)
    return AuctionOutcome(
        allocation=allocation,
        payments=empty_payments(scenario.n_data_sellers, scenario.n_uav_sellers),
        objective=allocation.objective,
        buyer_revenues=buyer_rev,
        data_seller_revenues=[0.0] * scenario.n_data_sellers,
        uav_seller_revenues=[0.0] * scenario.n_uav_sellers,
        pair_revenues=[],
        elapsed=elapsed,
    )


def run_method(
    name: str,
    scenario: Scenario,
    rsbm_seed: int = 0,
    foga_config: FogaConfig | None = None,
) -> AuctionOutcome:
    """Run one method by name on a scenario.

    The two mechanisms price their winners; the four baselines return
    allocation and objective only, with empty payment schedules.
    """
    if name == "vcg":
        return run_vcg(scenario)
    if name == "matching":
        return run_matching(scenario)
    start = time.perf_counter()
    matrices = build_joint_bids(scenario)
    if name == "hvpm":
        allocation = run_hvpm(matrices)
    elif name == "lcpm":
        allocation = run_lcpm(matrices)
    elif name == "rsbm":
        allocation = run_rsbm(matrices, rsbm_seed)
    elif name == "foga":
        allocation = run_foga(matrices, foga_config or FogaConfig())
    else:
        raise ValueError(f"unknown method {name!r}, expected one of {METHODS}")
    return _unpriced_outcome(scenario, allocation, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# method comparison
# ---------------------------------------------------------------------------


@dataclass
class TrialRecord:
    """One method on one generated scenario."""

    size: tuple[int, int, int]
    trial: int
    scenario_seed: int
    method: str
    objective: float
    elapsed: float


@dataclass
class MethodRow:
    """Per-size aggregate of one method; vs-exact fields are None when the
    exact method was skipped at that size."""

    size: tuple[int, int, int]
    method: str
    trials: int
    mean_objective: float
    mean_elapsed: float
    std_elapsed: float
    win_rate_vs_exact: float | None
    mean_relative_gap: float | None


@dataclass
class ComparisonReport:
    params: GenParams
    seed: int
    trials: int
    vcg_cap: tuple[int, int, int]
    rows: list[MethodRow] = field(default_factory=list)
    records: list[TrialRecord] = field(default_factory=list)


def _within_cap(size: tuple[int, int, int], cap: tuple[int, int, int]) -> bool:
    return all(s <= c for s, c in zip(size, cap))


def _compare_trial(args) -> list[TrialRecord]:
    (size, size_idx, trial, seed, base, run_vcg_too, foga_config) = args
    scenario_seed = derive_seed(seed, size_idx, trial)
    params = dataclasses.replace(
        base,
        n_buyers=size[0],
        n_data_sellers=size[1],
        n_uav_sellers=size[2],
        seed=scenario_seed,
    )
    scenario = generate(params)
    methods = [m for m in METHODS if run_vcg_too or m != "vcg"]
    records = []
    for method in methods:
        outcome = run_method(
            method,
            scenario,
            rsbm_seed=derive_seed(seed, size_idx, trial, 1),
            foga_config=dataclasses.replace(
                foga_config, seed=derive_seed(seed, size_idx, trial, 2)
            ),
        )
        records.append(
            TrialRecord(
                size=size,
                trial=trial,
                scenario_seed=scenario_seed,
                method=method,
                objective=outcome.objective,
                elapsed=outcome.elapsed,
            )
        )
    return records


def compare(
    sizes: list[tuple[int, int, int]],
    trials: int,
    seed: int = 0,
    params: GenParams | None = None,
    vcg_cap: tuple[int, int, int] = DEFAULT_VCG_CAP,
    foga_config: FogaConfig | None = None,
    workers: int = 1,
) -> ComparisonReport:
    """Run every method on ``trials`` fresh scenarios per size and aggregate.

    Each trial draws its own scenario seed from (seed, size index, trial),
    so any row can be regenerated in isolation. The exact method is
    skipped for sizes above ``vcg_cap``; vs-exact statistics are then
    undefined for that size. A method "wins" a trial when its objective
    reaches the exact optimum within 1e-9.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    base = params if params is not None else GenParams(1, 1, 1)
    cfg = foga_config or FogaConfig()
    report = ComparisonReport(
        params=base, seed=seed, trials=trials, vcg_cap=vcg_cap
    )

    tasks = []
    for size_idx, size in enumerate(sizes):
        run_vcg_too = _within_cap(size, vcg_cap)
        for trial in range(trials):
            tasks.append((size, size_idx, trial, seed, base, run_vcg_too, cfg))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_compare_trial, tasks))
    else:
        batches = [_compare_trial(t) for t in tasks]
    for batch in batches:
        report.records.extend(batch)

    for size in sizes:
        by_method: dict[str, list[TrialRecord]] = {}
        for rec in report.records:
            if rec.size == size:
                by_method.setdefault(rec.method, []).append(rec)
        exact_by_trial = {
            rec.trial: rec.objective for rec in by_method.get("vcg", [])
        }
        for method in METHODS:
            recs = by_method.get(method)
            if not recs:
                continue
            objectives = [r.objective for r in recs]
            elapsed = [r.elapsed for r in recs]
            if exact_by_trial:
                wins = 0
                gaps = []
                for r in recs:
                    exact = exact_by_trial[r.trial]
                    if r.objective >= exact - 1e-9:
                        wins += 1
                    gaps.append(0.0 if exact == 0.0 else (exact - r.objective) / exact)
                win_rate: float | None = wins / len(recs)
                mean_gap: float | None = sum(gaps) / len(gaps)
            else:
                win_rate = None
                mean_gap = None
            report.rows.append(
                MethodRow(
                    size=size,
                    method=method,
                    trials=len(recs),
                    mean_objective=sum(objectives) / len(objectives),
                    mean_elapsed=float(np.mean(elapsed)),
                    std_elapsed=float(np.std(elapsed)),
                    win_rate_vs_exact=win_rate,
                    mean_relative_gap=mean_gap,
                )
            )
    return report


# ---------------------------------------------------------------------------
# property audits
# ---------------------------------------------------------------------------

AUDIT_KINDS = ("truthfulness", "individual-rationality", "stability")


def _audit_chunk(args) -> AuditReport:
    (kind, start, count, size, grid, seed, mech_names) = args
    # same per-index seeds as a sequential run, so chunking is invisible
    scenarios = [
        generate(GenParams(*size, seed=derive_seed(seed, i)))
        for i in range(start, start + count)
    ]
    mechs = {k: v for k, v in default_mechanisms().items() if k in mech_names}
    if kind == "truthfulness":
        return truthfulness_audit(
            count, size, grid_points=grid, seed=seed,
            mechanisms=mechs, scenarios=scenarios,
        )
    if kind == "individual-rationality":
        return individual_rationality_audit(
            count, size, seed=seed, mechanisms=mechs, scenarios=scenarios
        )
    return stability_audit(count, size, seed=seed, scenarios=scenarios)


def run_audit(
    kind: str,
    n_scenarios: int,
    size: tuple[int, int, int],
    grid: int = 21,
    seed: int = 0,
    mechanisms: tuple[str, ...] = ("vcg", "matching"),
    workers: int = 1,
) -> AuditReport:
    """Run one property audit, optionally spreading scenarios over workers.

    Scenario i always gets the seed derived from (seed, i), so the report
    is identical whatever the worker count; chunks are merged in index
    order.
    """
    if kind not in AUDIT_KINDS:
        raise ValueError(f"unknown audit kind {kind!r}, expected one of {AUDIT_KINDS}")
    if n_scenarios < 1:
        raise ValueError(f"n_scenarios must be >= 1, got {n_scenarios}")
    for name in mechanisms:
        if name not in ("vcg", "matching"):
            raise ValueError(f"unknown mechanism {name!r}")
    n_chunks = max(1, min(workers, n_scenarios))
    base_size, remainder = divmod(n_scenarios, n_chunks)
    tasks = []
    start = 0
    for c in range(n_chunks):
        count = base_size + (1 if c < remainder else 0)
        tasks.append((kind, start, count, size, grid, seed, mechanisms))
        start += count
    if n_chunks > 1:
        with ProcessPoolExecutor(max_workers=n_chunks) as pool:
            parts = list(pool.map(_audit_chunk, tasks))
    else:
        parts = [_audit_chunk(tasks[0])]
    merged = parts[0]
    for part in parts[1:]:
        merged.scenarios_tested += part.scenarios_tested
        merged.checks_tested += part.checks_tested
        merged.violations.extend(part.violations)
    return merged


def write_audit_json(path: str | Path, report: AuditReport) -> None:
    """Deterministic audit report dump; floats as repr strings."""
    doc = {
        "kind": report.kind,
        "mechanisms": report.mechanisms,
        "size": _size_str(report.size),
        "seed": report.seed,
        "scenarios_tested": report.scenarios_tested,
        "checks_tested": report.checks_tested,
        "passed": report.passed,
        "violations": [
            {
                "scenario_seed": v.scenario_seed,
                "mechanism": v.mechanism,
                "subject": v.subject,
                "check": v.check,
                "expected": repr(v.expected),
                "observed": repr(v.observed),
            }
            for v in report.violations
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# runtime benchmark
# ---------------------------------------------------------------------------


@dataclass
class BenchRow:
    size: tuple[int, int, int]
    method: str
    trials: int
    mean_elapsed: float
    std_elapsed: float
    status: str  # ok | budget-exhausted | skipped


def bench(
    sizes: list[tuple[int, int, int]],
    trials: int,
    seed: int = 0,
    methods: tuple[str, ...] = METHODS,
    vcg_cap: tuple[int, int, int] = DEFAULT_VCG_CAP,
    vcg_budget: float = 60.0,
    foga_config: FogaConfig | None = None,
) -> list[BenchRow]:
    """Measure wall-clock runtime per method per size.

    The exact method is skipped entirely above ``vcg_cap`` and otherwise
    stops early once its measured time at one size exceeds ``vcg_budget``
    seconds, reporting the mean over the trials that did run.
    """
    cfg = foga_config or FogaConfig()
    rows = []
    for size_idx, size in enumerate(sizes):
        for method in methods:
            if method == "vcg" and not _within_cap(size, vcg_cap):
                rows.append(BenchRow(size, method, 0, 0.0, 0.0, "skipped"))
                continue
            times = []
            status = "ok"
            for trial in range(trials):
                scenario = generate(
                    GenParams(*size, seed=derive_seed(seed, size_idx, trial))
                )
                outcome = run_method(
                    method,
                    scenario,
                    rsbm_seed=derive_seed(seed, size_idx, trial, 1),
                    foga_config=dataclasses.replace(
                        cfg, seed=derive_seed(seed, size_idx, trial, 2)
                    ),
                )
                times.append(outcome.elapsed)
                if method == "vcg" and sum(times) > vcg_budget:
                    status = "budget-exhausted" if trial + 1 < trials else "ok"
                    break
            rows.append(
                BenchRow(
                    size=size,
                    method=method,
                    trials=len(times),
                    mean_elapsed=float(np.mean(times)),
                    std_elapsed=float(np.std(times)),
                    status=status,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# report files
# ---------------------------------------------------------------------------


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _size_str(size: tuple[int, int, int]) -> str:
    return f"{size[0]}/{size[1]}/{size[2]}"


def _parse_size(text: str) -> tuple[int, int, int]:
    parts = text.split("/")
    if len(parts) != 3:
        raise ValueError(f"size must look like L/M/N, got {text!r}")
    return (int(parts[0]), int(parts[1]), int(parts[2]))


WINNER_COLUMNS = (
    "winning_pair",
    "uav_bid",
    "do_bid",
    "joint_bid",
    "total_payment",
    "pair_revenue",
    "uav_payment",
    "uav_revenue",
    "do_payment",
    "do_revenue",
)


def write_winner_table(path: str | Path, scenario: Scenario, outcome: AuctionOutcome) -> None:
    """Per-winner settlement table, one row per winning triple.

    ``winning_pair`` is formatted buyer/uav/do. Methods that do not price
    leave every payment and revenue column empty.
    """
    priced = bool(outcome.payments.pair_totals)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(WINNER_COLUMNS)
        for (l, m, n) in outcome.allocation.sorted_triples():
            q = scenario.data_sellers[m].sell_bids[l]
            s = scenario.uav_sellers[n].sell_bids[m][l]
            if priced:
                total = outcome.payments.pair_totals[(l, m, n)]
                p_d = outcome.payments.data_seller_payments[m]
                p_u = outcome.payments.uav_seller_payments[n]
                tail = [
                    _fmt(total),
                    _fmt(total - (q + s)),
                    _fmt(p_u),
                    _fmt(p_u - s),
                    _fmt(p_d),
                    _fmt(p_d - q),
                ]
            else:
                tail = [""] * 6
            writer.writerow([f"{l}/{n}/{m}", _fmt(s), _fmt(q), _fmt(q + s)] + tail)


def read_winner_table(path: str | Path) -> list[dict[str, float | str | None]]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != WINNER_COLUMNS:
            raise ValueError(f"unexpected winner-table header in {path}")
        for raw in reader:
            row: dict[str, float | str | None] = {"winning_pair": raw["winning_pair"]}
            for col in WINNER_COLUMNS[1:]:
                row[col] = float(raw[col]) if raw[col] else None
            rows.append(row)
    return rows


def write_outcome_json(
    path: str | Path, scenario: Scenario, outcome: AuctionOutcome, method: str
) -> None:
    """Full outcome dump. Carries the scenario seed, never the runtime."""
    doc = {
        "method": method,
        "scenario_seed": scenario.seed,
        "objective": repr(outcome.objective),
        "winning_triples": [list(t) for t in outcome.allocation.sorted_triples()],
        "pair_payments": [
            {"triple": list(t), "total": repr(outcome.payments.pair_totals[t])}
            for t in sorted(outcome.payments.pair_totals)
        ],
        "data_seller_payments": [repr(x) for x in outcome.payments.data_seller_payments],
        "uav_seller_payments": [repr(x) for x in outcome.payments.uav_seller_payments],
        "buyer_revenues": [repr(x) for x in outcome.buyer_revenues],
        "data_seller_revenues": [repr(x) for x in outcome.data_seller_revenues],
        "uav_seller_revenues": [repr(x) for x in outcome.uav_seller_revenues],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


COMPARISON_COLUMNS = (
    "size",
    "method",
    "trials",
    "mean_objective",
    "win_rate_vs_exact",
    "mean_relative_gap",
)


def write_comparison_csv(path: str | Path, report: ComparisonReport) -> None:
    """Aggregate objectives per size and method; no timing columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_COLUMNS)
        for row in report.rows:
            writer.writerow(
                [
                    _size_str(row.size),
                    row.method,
                    row.trials,
                    _fmt(row.mean_objective),
                    _fmt(row.win_rate_vs_exact),
                    _fmt(row.mean_relative_gap),
                ]
            )


def read_comparison_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COMPARISON_COLUMNS:
            raise ValueError(f"unexpected comparison header in {path}")
        for raw in reader:
            rows.append(
                {
                    "size": _parse_size(raw["size"]),
                    "method": raw["method"],
                    "trials": int(raw["trials"]),
                    "mean_objective": float(raw["mean_objective"]),
                    "win_rate_vs_exact": (
                        float(raw["win_rate_vs_exact"]) if raw["win_rate_vs_exact"] else None
                    ),
                    "mean_relative_gap": (
                        float(raw["mean_relative_gap"]) if raw["mean_relative_gap"] else None
                    ),
                }
            )
    return rows


def write_timing_csv(path: str | Path, report: ComparisonReport) -> None:
    """Wall-clock sidecar for a comparison; excluded from determinism."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size", "method", "trials", "mean_runtime_s", "std_runtime_s"])
        for row in report.rows:
            writer.writerow(
                [
                    _size_str(row.size),
                    row.method,
                    row.trials,
                    _fmt(row.mean_elapsed),
                    _fmt(row.std_elapsed),
                ]
            )


TRIAL_COLUMNS = ("size", "trial", "scenario_seed", "method", "objective", "gen_params")


def write_trial_records(path: str | Path, report: ComparisonReport) -> None:
    """Raw per-trial objectives; every row regenerable from its own cells."""
    params_json = json.dumps(dataclasses.asdict(report.params), sort_keys=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIAL_COLUMNS)
        for rec in report.records:
            writer.writerow(
                [
                    _size_str(rec.size),
                    rec.trial,
                    rec.scenario_seed,
                    rec.method,
                    _fmt(rec.objective),
                    params_json,
                ]
            )


def read_trial_records(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRIAL_COLUMNS:
            raise ValueError(f"unexpected trial-record header in {path}")
        for raw in reader:
            rows.append(
                {
                    "size": _parse_size(raw["size"]),
                    "trial": int(raw["trial"]),
                    "scenario_seed": int(raw["scenario_seed"]),
                    "method": raw["method"],
                    "objective": float(raw["objective"]),
                    "gen_params": json.loads(raw["gen_params"]),
                }
            )
    return rows


BENCH_COLUMNS = ("size", "method", "trials", "mean_runtime_s", "std_runtime_s", "status")


def write_bench_csv(path: str | Path, rows: list[BenchRow]) -> None:
    """Benchmark table; timing data, excluded from determinism."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    _size_str(row.size),
                    row.method,
                    row.trials,
                    _fmt(row.mean_elapsed) if row.trials else "",
                    _fmt(row.std_elapsed) if row.trials else "",
                    row.status,
                ]
            )


def read_bench_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != BENCH_COLUMNS:
            raise ValueError(f"unexpected bench header in {path}")
        for raw in reader:
            rows.append(
                {
                    "size": _parse_size(raw["size"]),
                    "method": raw["method"],
                    "trials": int(raw["trials"]),
                    "mean_runtime_s": float(raw["mean_runtime_s"]) if raw["mean_runtime_s"] else None,
                    "std_runtime_s": float(raw["std_runtime_s"]) if raw["std_runtime_s"] else None,
                    "status": raw["status"],
                }
            )
    return rows
