"""Marginal-contribution pricing on top of the exact solver.

Each winning pair is paid its joint bid plus the welfare it adds to the
market: the optimal objective, minus the optimal objective of the market
with both of its physical sellers removed. The pair total is then split
between the data seller and the UAV in proportion to their quoted bids.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .market import AuctionOutcome, ConsistencyError, Scenario, assemble_outcome
from .pairing import JointBidMatrix, build_joint_bids
from .wdp import solve_exact, solve_exact_excluding

__all__ = ["PaymentSchedule", "empty_payments", "vcg_pair_payment", "split_payment", "run_vcg"]


@dataclass
class PaymentSchedule:
    """Pair totals keyed by winning triple, plus per-seller shares.

    ``data_seller_payments[m]`` / ``uav_seller_payments[n]`` hold what each
    physical seller receives; losers hold exactly 0.0, and each side's
    shares for one triple sum exactly to that triple's pair total.
    """

    pair_totals: dict[tuple[int, int, int], float] = field(default_factory=dict)
    data_seller_payments: list[float] = field(default_factory=list)
    uav_seller_payments: list[float] = field(default_factory=list)


def empty_payments(n_data_sellers: int, n_uav_sellers: int) -> PaymentSchedule:
    """All-zero schedule, used by mechanisms that do not price winners."""
    return PaymentSchedule(
        pair_totals={},
        data_seller_payments=[0.0] * n_data_sellers,
        uav_seller_payments=[0.0] * n_uav_sellers,
    )


def vcg_pair_payment(objective: float, objective_excluding: float, joint_bid: float) -> float:
    """Pair total: joint bid plus the pair's marginal contribution.

    ``objective_excluding`` is the market optimum with the pair's two
    sellers removed; it can never exceed the unrestricted optimum.
    """
    if objective < objective_excluding - 1e-9:
        raise ConsistencyError(
            f"restricted optimum {objective_excluding} exceeds full optimum {objective}"
        )
    return objective - objective_excluding + joint_bid


def split_payment(total: float, data_bid: float, uav_bid: float) -> tuple[float, float]:
    """Split a pair total in proportion to the component bids.

    The UAV share is taken by subtraction so the two always sum exactly
    to ``total``.
    """
    joint = data_bid + uav_bid
    if joint <= 0:
        raise ValueError(f"joint bid must be > 0 to split a payment, got {joint}")
    data_share = total * data_bid / joint
    return data_share, total - data_share


def _vcg_payments(
    matrices: list[JointBidMatrix],
    allocation_triples: set[tuple[int, int, int]],
    objective: float,
    n_data_sellers: int,
    n_uav_sellers: int,
) -> PaymentSchedule:
    payments = empty_payments(n_data_sellers, n_uav_sellers)
    for (l, m, n) in sorted(allocation_triples):
        entry = matrices[l].entry(m, n)
        reduced = solve_exact_excluding(matrices, m, n).objective
        total = vcg_pair_payment(objective, reduced, entry.joint_bid)
        data_share, uav_share = split_payment(total, entry.data_bid, entry.uav_bid)
        payments.pair_totals[(l, m, n)] = total
        payments.data_seller_payments[m] = data_share
        payments.uav_seller_payments[n] = uav_share
    return payments


def run_vcg(scenario: Scenario) -> AuctionOutcome:
    """Exact auction: optimal allocation plus marginal-contribution payments."""
    start = time.perf_counter()
    matrices = build_joint_bids(scenario)
    allocation = solve_exact(matrices)
    payments = _vcg_payments(
        matrices,
        allocation.triples,
        allocation.objective,
        scenario.n_data_sellers,
        scenario.n_uav_sellers,
    )
    elapsed = time.perf_counter() - start
    return assemble_outcome(scenario, allocation, payments, elapsed)
