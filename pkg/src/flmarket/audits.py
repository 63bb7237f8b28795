"""Executable checks of the economic promises.

Three audits, each over a batch of seeded random markets:

* truthfulness: replay each winning pair with its joint bid scaled across
  a grid, re-running the full auction each time, and re-split each pair's
  awarded payment under shifts between the two component bids; no
  deviation may beat the truthful revenue (measured against true costs).
* individual rationality: winners never run a loss, component shares
  cover component bids, losers get and owe exactly nothing.
* stability: rebuilding the preference lists and re-granting greedily
  reproduces the matching exactly.

A joint-bid deviation is one seller acting alone, so the market is fully
recomputed. A re-split moves both components against each other while the
joint quote, and with it the pair's award, stays put; the sellers cannot
coordinate in this market, so only the settlement of the fixed award is
replayed. Mechanisms are passed as plain callables so intentionally
broken payment rules can be audited with the same machinery; the stock
mapping runs the exact auction and the greedy matching.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .market import AuctionOutcome, Scenario
from .matching import build_preference_lists, greedy_match, run_matching
from .pairing import build_joint_bids
from .scenario import GenParams, generate
from .vcg import run_vcg, split_payment

__all__ = [
    "AuditViolation",
    "AuditReport",
    "MechanismFn",
    "default_mechanisms",
    "derive_seed",
    "truthfulness_audit",
    "individual_rationality_audit",
    "stability_audit",
]

MechanismFn = Callable[[Scenario], AuctionOutcome]

TOLERANCE = 1e-9

DEVIATION_GRID_LOW = 0.2
DEVIATION_GRID_HIGH = 3.0
SWAP_FRACTIONS = (0.25, 0.5, 0.75)


def default_mechanisms() -> dict[str, MechanismFn]:
    return {"vcg": run_vcg, "matching": run_matching}


@dataclass
class AuditViolation:
    scenario_seed: int
    mechanism: str
    subject: str
    check: str
    expected: float
    observed: float

    def describe(self) -> str:
        return (
            f"seed={self.scenario_seed} mechanism={self.mechanism} {self.subject}: "
            f"{self.check} (expected {self.expected!r}, observed {self.observed!r})"
        )


@dataclass
class AuditReport:
    kind: str
    mechanisms: list[str]
    scenarios_tested: int
    checks_tested: int
    seed: int
    size: tuple[int, int, int]
    violations: list[AuditViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def derive_seed(seed: int, *key: int) -> int:
    """Stable per-trial seed from a root seed and an index path."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])


def _scenario_batch(
    n_scenarios: int,
    size: tuple[int, int, int],
    seed: int,
    scenarios: list[Scenario] | None,
) -> list[Scenario]:
    if scenarios is not None:
        return scenarios
    L, M, N = size
    return [
        generate(GenParams(L, M, N, seed=derive_seed(seed, i)))
        for i in range(n_scenarios)
    ]


def _with_data_bid(scenario: Scenario, m: int, l: int, bid: float) -> Scenario:
    out = copy.deepcopy(scenario)
    out.data_sellers[m].sell_bids[l] = bid
    return out


def truthfulness_audit(
    n_scenarios: int,
    size: tuple[int, int, int],
    grid_points: int = 21,
    seed: int = 0,
    mechanisms: Mapping[str, MechanismFn] | None = None,
    scenarios: list[Scenario] | None = None,
) -> AuditReport:
    """No winning pair may profit from misreporting.

    For every winning pair the joint bid is swept over ``grid_points``
    multiples in [0.2, 3.0] of the truthful bid (implemented by moving the
    data seller's component, which shifts the joint bid one-for-one) with
    the whole auction re-run, and the two components are shifted against
    each other holding the joint bid fixed with the pair's awarded payment
    re-settled pro rata. Revenue is always measured against true costs.
    """
    mechs = dict(mechanisms) if mechanisms is not None else default_mechanisms()
    report = AuditReport(
        kind="truthfulness",
        mechanisms=sorted(mechs),
        scenarios_tested=0,
        checks_tested=0,
        seed=seed,
        size=size,
    )
    grid = np.linspace(DEVIATION_GRID_LOW, DEVIATION_GRID_HIGH, grid_points)
    for scenario in _scenario_batch(n_scenarios, size, seed, scenarios):
        report.scenarios_tested += 1
        for name in sorted(mechs):
            mech = mechs[name]
            truthful = mech(scenario)
            for (l, m, n) in truthful.allocation.sorted_triples():
                q = scenario.data_sellers[m].sell_bids[l]
                s = scenario.uav_sellers[n].sell_bids[m][l]
                joint = q + s
                true_cost = scenario.true_joint_cost(l, m, n)
                pair_total = truthful.payments.pair_totals[(l, m, n)]
                truthful_pair = pair_total - true_cost
                truthful_shares = split_payment(pair_total, q, s)
                truthful_data = truthful_shares[0] - scenario.data_sellers[m].true_costs[l]
                truthful_uav = truthful_shares[1] - scenario.uav_sellers[n].true_costs[m][l]
                subject = f"pair l={l} m={m} n={n}"

                for factor in grid:
                    deviated = _with_data_bid(scenario, m, l, float(factor) * joint - s)
                    outcome = mech(deviated)
                    report.checks_tested += 1
                    if (l, m, n) in outcome.payments.pair_totals:
                        observed = outcome.payments.pair_totals[(l, m, n)] - true_cost
                    else:
                        observed = 0.0
                    if observed > truthful_pair + TOLERANCE:
                        report.violations.append(
                            AuditViolation(
                                scenario_seed=scenario.seed,
                                mechanism=name,
                                subject=subject,
                                check=f"joint bid scaled by {float(factor):g} beats truth",
                                expected=truthful_pair,
                                observed=observed,
                            )
                        )

                # Re-splits keep the joint quote and therefore the awarded
                # payment; only the settlement of that payment is replayed.
                for fraction in SWAP_FRACTIONS:
                    shift = fraction * q
                    report.checks_tested += 1
                    observed = (
                        split_payment(pair_total, q - shift, s + shift)[0]
                        - scenario.data_sellers[m].true_costs[l]
                    )
                    if observed > truthful_data + TOLERANCE:
                        report.violations.append(
                            AuditViolation(
                                scenario_seed=scenario.seed,
                                mechanism=name,
                                subject=f"data seller {m} (buyer {l})",
                                check=f"underbidding own share by {fraction:g}q beats truth",
                                expected=truthful_data,
                                observed=observed,
                            )
                        )

                    shift = fraction * s
                    report.checks_tested += 1
                    observed = (
                        split_payment(pair_total, q + shift, s - shift)[1]
                        - scenario.uav_sellers[n].true_costs[m][l]
                    )
                    if observed > truthful_uav + TOLERANCE:
                        report.violations.append(
                            AuditViolation(
                                scenario_seed=scenario.seed,
                                mechanism=name,
                                subject=f"uav seller {n} (buyer {l}, data seller {m})",
                                check=f"underbidding own share by {fraction:g}s beats truth",
                                expected=truthful_uav,
                                observed=observed,
                            )
                        )
    return report


def individual_rationality_audit(
    n_scenarios: int,
    size: tuple[int, int, int],
    seed: int = 0,
    mechanisms: Mapping[str, MechanismFn] | None = None,
    scenarios: list[Scenario] | None = None,
) -> AuditReport:
    """Winners cover their bids, losers are left exactly alone."""
    mechs = dict(mechanisms) if mechanisms is not None else default_mechanisms()
    report = AuditReport(
        kind="individual-rationality",
        mechanisms=sorted(mechs),
        scenarios_tested=0,
        checks_tested=0,
        seed=seed,
        size=size,
    )

    def bad(scenario, name, subject, check, expected, observed):
        report.violations.append(
            AuditViolation(scenario.seed, name, subject, check, expected, observed)
        )

    for scenario in _scenario_batch(n_scenarios, size, seed, scenarios):
        report.scenarios_tested += 1
        for name in sorted(mechs):
            outcome = mechs[name](scenario)
            winners_m = {m for (_l, m, _n) in outcome.allocation.triples}
            winners_n = {n for (_l, _m, n) in outcome.allocation.triples}
            for (l, m, n) in outcome.allocation.sorted_triples():
                q = scenario.data_sellers[m].sell_bids[l]
                s = scenario.uav_sellers[n].sell_bids[m][l]
                total = outcome.payments.pair_totals[(l, m, n)]
                report.checks_tested += 3
                if total - (q + s) < -TOLERANCE:
                    bad(scenario, name, f"pair l={l} m={m} n={n}",
                        "pair revenue is negative", q + s, total)
                if outcome.payments.data_seller_payments[m] < q - TOLERANCE:
                    bad(scenario, name, f"data seller {m}",
                        "share below bid", q, outcome.payments.data_seller_payments[m])
                if outcome.payments.uav_seller_payments[n] < s - TOLERANCE:
                    bad(scenario, name, f"uav seller {n}",
                        "share below bid", s, outcome.payments.uav_seller_payments[n])
            for m in range(scenario.n_data_sellers):
                if m in winners_m:
                    continue
                report.checks_tested += 1
                if outcome.payments.data_seller_payments[m] != 0.0 \
                        or outcome.data_seller_revenues[m] != 0.0:
                    bad(scenario, name, f"data seller {m}",
                        "loser not at exactly zero", 0.0,
                        outcome.payments.data_seller_payments[m])
            for n in range(scenario.n_uav_sellers):
                if n in winners_n:
                    continue
                report.checks_tested += 1
                if outcome.payments.uav_seller_payments[n] != 0.0 \
                        or outcome.uav_seller_revenues[n] != 0.0:
                    bad(scenario, name, f"uav seller {n}",
                        "loser not at exactly zero", 0.0,
                        outcome.payments.uav_seller_payments[n])
    return report


def stability_audit(
    n_scenarios: int,
    size: tuple[int, int, int],
    seed: int = 0,
    scenarios: list[Scenario] | None = None,
) -> AuditReport:
    """The greedy matching is a fixed point of its own preference lists."""
    report = AuditReport(
        kind="stability",
        mechanisms=["matching"],
        scenarios_tested=0,
        checks_tested=0,
        seed=seed,
        size=size,
    )
    for scenario in _scenario_batch(n_scenarios, size, seed, scenarios):
        report.scenarios_tested += 1
        report.checks_tested += 1
        outcome = run_matching(scenario)
        lists = build_preference_lists(build_joint_bids(scenario))
        replay = greedy_match(lists)
        again = greedy_match(lists)
        if (replay.triples != outcome.allocation.triples
                or again.triples != replay.triples):
            report.violations.append(
                AuditViolation(
                    scenario_seed=scenario.seed,
                    mechanism="matching",
                    subject="allocation",
                    check="greedy replay changed the matching",
                    expected=float(len(outcome.allocation.triples)),
                    observed=float(len(replay.triples)),
                )
            )
    return report
