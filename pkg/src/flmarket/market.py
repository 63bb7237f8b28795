"""Core market model for a three-party federated-learning service market.

Buyers request model training on data they do not own. Data sellers hold
labelled samples and quote a price per training task; UAV sellers fly to a
data seller, run the training on board, and quote a price that covers the
flight plus the model upload. A buyer can be served by any (data seller,
UAV seller) pair, and values the service by a concave log curve of the
data volume it gets trained on:

    accuracy(d) = alpha1 * ln(1 + alpha2 * d)

Costs are linear: a data seller's true cost is ``unit_cost * data_size``,
a UAV's is ``unit_fly_cost * distance + model_size_kb / rate_kbps``.
All money amounts live in one abstract currency unit.

This module owns the bid/request/outcome value types and the pure pricing
formulas. Mechanisms (exact auction, greedy matching, baselines) live in
their own modules and only assemble these pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .vcg import PaymentSchedule
    from .wdp import Allocation

__all__ = [
    "ConsistencyError",
    "DataSellerBid",
    "UavSellerBid",
    "BuyerRequest",
    "Scenario",
    "ParticipantRevenues",
    "AuctionOutcome",
    "accuracy_of_data",
    "flying_cost",
    "service_cost",
    "uav_total_cost",
    "buyer_valuation",
    "participant_revenues",
    "objective_value",
    "assemble_outcome",
]


class ConsistencyError(ValueError):
    """An allocation, payment schedule and scenario disagree with each other."""


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


@dataclass
class DataSellerBid:
    """One data seller's offer, indexed by buyer.

    ``data_sizes[l]`` is the raw sample count offered to buyer ``l``,
    ``unit_costs[l]`` the true cost per sample, ``true_costs[l]`` the
    resulting total cost and ``sell_bids[l]`` the price actually quoted
    (equal to the true cost when the seller reports truthfully).
    """

    seller_id: int
    data_sizes: list[float]
    unit_costs: list[float]
    sell_bids: list[float]
    true_costs: list[float]


@dataclass
class UavSellerBid:
    """One UAV seller's offer.

    ``distances[m]`` is the flight distance to data seller ``m`` and
    ``unit_fly_cost`` the price per distance unit. ``service_params[l]``
    holds ``(model_size_kb, rate_kbps)`` for buyer ``l``; transferring the
    trained model costs ``model_size_kb / rate_kbps``. ``true_costs`` and
    ``sell_bids`` are M x L tables indexed ``[data_seller][buyer]``.
    """

    seller_id: int
    distances: list[float]
    unit_fly_cost: float
    service_params: list[tuple[float, float]]
    true_costs: list[list[float]]
    sell_bids: list[list[float]]


@dataclass
class BuyerRequest:
    """One buyer's request: a data-volume floor and its valuation table.

    ``valuations`` is an M x N table indexed ``[data_seller][uav_seller]``;
    an entry is exactly 0.0 when the data seller offers less than
    ``required_data`` to this buyer, else the log valuation of the offer.
    """

    buyer_id: int
    required_data: float
    valuation_alpha1: float
    valuation_alpha2: float
    valuations: list[list[float]]


@dataclass
class Scenario:
    """A complete market instance. Treat as immutable once built."""

    buyers: list[BuyerRequest]
    data_sellers: list[DataSellerBid]
    uav_sellers: list[UavSellerBid]
    data_unit_scale: float = 500.0
    seed: int = 0

    @property
    def n_buyers(self) -> int:
        return len(self.buyers)

    @property
    def n_data_sellers(self) -> int:
        return len(self.data_sellers)

    @property
    def n_uav_sellers(self) -> int:
        return len(self.uav_sellers)

    def joint_bid(self, buyer: int, data_seller: int, uav_seller: int) -> float:
        """Quoted price of the pair (data_seller, uav_seller) for this buyer."""
        q = self.data_sellers[data_seller].sell_bids[buyer]
        s = self.uav_sellers[uav_seller].sell_bids[data_seller][buyer]
        return q + s

    def true_joint_cost(self, buyer: int, data_seller: int, uav_seller: int) -> float:
        c = self.data_sellers[data_seller].true_costs[buyer]
        e = self.uav_sellers[uav_seller].true_costs[data_seller][buyer]
        return c + e


@dataclass
class ParticipantRevenues:
    """Per-participant revenue vectors; losers hold exactly 0.0."""

    buyer_revenues: list[float]
    data_seller_revenues: list[float]
    uav_seller_revenues: list[float]
    pair_revenues: list[float]  # ordered by the winning triple's buyer id


@dataclass
class AuctionOutcome:
    """Everything a mechanism run produces.

    ``pair_revenues`` follows the winning triples sorted by buyer id.
    ``elapsed`` is wall-clock seconds and deliberately excluded from any
    serialized artifact so reruns stay byte-identical.
    """

    allocation: "Allocation"
    payments: "PaymentSchedule"
    objective: float
    buyer_revenues: list[float] = field(default_factory=list)
    data_seller_revenues: list[float] = field(default_factory=list)
    uav_seller_revenues: list[float] = field(default_factory=list)
    pair_revenues: list[float] = field(default_factory=list)
    elapsed: float = 0.0


# ---------------------------------------------------------------------------
# pricing formulas
# ---------------------------------------------------------------------------


def accuracy_of_data(data_size: float, alpha1: float, alpha2: float) -> float:
    """Concave accuracy proxy ``alpha1 * ln(1 + alpha2 * data_size)``."""
    if data_size < 0:
        raise ValueError(f"data_size must be >= 0, got {data_size}")
    if alpha1 <= 0 or alpha2 <= 0:
        raise ValueError(f"alpha parameters must be > 0, got {alpha1}, {alpha2}")
    return alpha1 * math.log(1.0 + alpha2 * data_size)


def flying_cost(unit_fly_cost: float, distance: float) -> float:
    """Linear flight cost for one trip."""
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance}")
    if unit_fly_cost < 0:
        raise ValueError(f"unit_fly_cost must be >= 0, got {unit_fly_cost}")
    return unit_fly_cost * distance


def service_cost(model_size_kb: float, rate_kbps: float) -> float:
    """Model upload cost: seconds to push the trained model to the buyer."""
    if rate_kbps <= 0:
        raise ValueError(f"rate_kbps must be > 0, got {rate_kbps}")
    if model_size_kb < 0:
        raise ValueError(f"model_size_kb must be >= 0, got {model_size_kb}")
    return model_size_kb / rate_kbps


def uav_total_cost(flying: float, service: float) -> float:
    """A UAV's true cost is flight plus model upload."""
    if flying < 0 or service < 0:
        raise ValueError(f"cost components must be >= 0, got {flying}, {service}")
    return flying + service


def buyer_valuation(buyer: BuyerRequest, data_size: float, data_unit_scale: float) -> float:
    """Value of an offer to ``buyer``: zero below its data floor, else the
    log curve evaluated on the offer rescaled to valuation units."""
    if data_unit_scale <= 0:
        raise ValueError(f"data_unit_scale must be > 0, got {data_unit_scale}")
    if data_size < buyer.required_data:
        return 0.0
    return accuracy_of_data(
        data_size / data_unit_scale, buyer.valuation_alpha1, buyer.valuation_alpha2
    )


# ---------------------------------------------------------------------------
# outcome accounting
# ---------------------------------------------------------------------------


def _check_allocation(scenario: Scenario, allocation: "Allocation") -> None:
    seen_l: set[int] = set()
    seen_m: set[int] = set()
    seen_n: set[int] = set()
    for (l, m, n) in allocation.triples:
        if not (0 <= l < scenario.n_buyers and 0 <= m < scenario.n_data_sellers
                and 0 <= n < scenario.n_uav_sellers):
            raise ConsistencyError(f"triple {(l, m, n)} is out of range for this scenario")
        if l in seen_l or m in seen_m or n in seen_n:
            raise ConsistencyError(f"triple {(l, m, n)} reuses an already matched participant")
        seen_l.add(l)
        seen_m.add(m)
        seen_n.add(n)
        offered = scenario.data_sellers[m].data_sizes[l]
        if offered < scenario.buyers[l].required_data:
            raise ConsistencyError(
                f"triple {(l, m, n)} offers {offered} samples, below the buyer floor"
            )


def objective_value(scenario: Scenario, allocation: "Allocation") -> float:
    """Social welfare of an allocation: sum of valuation minus joint bid."""
    _check_allocation(scenario, allocation)
    total = 0.0
    for (l, m, n) in sorted(allocation.triples):
        v = scenario.buyers[l].valuations[m][n]
        total += v - scenario.joint_bid(l, m, n)
    return total


def participant_revenues(
    scenario: Scenario, allocation: "Allocation", payments: "PaymentSchedule"
) -> ParticipantRevenues:
    """Revenue of every participant under a payment schedule.

    Buyers keep valuation minus the pair's quoted price; sellers keep their
    payment minus their quote; a pair keeps its total payment minus its
    joint quote. Non-winners sit at exactly 0.0.
    """
    _check_allocation(scenario, allocation)
    triples = sorted(allocation.triples)
    for key in payments.pair_totals:
        if key not in allocation.triples:
            raise ConsistencyError(f"payment recorded for non-winning triple {key}")
    for key in triples:
        if key not in payments.pair_totals:
            raise ConsistencyError(f"winning triple {key} has no payment recorded")

    buyer_rev = [0.0] * scenario.n_buyers
    data_rev = [0.0] * scenario.n_data_sellers
    uav_rev = [0.0] * scenario.n_uav_sellers
    pair_rev = []
    for (l, m, n) in triples:
        v = scenario.buyers[l].valuations[m][n]
        q = scenario.data_sellers[m].sell_bids[l]
        s = scenario.uav_sellers[n].sell_bids[m][l]
        buyer_rev[l] = v - (q + s)
        data_rev[m] = payments.data_seller_payments[m] - q
        uav_rev[n] = payments.uav_seller_payments[n] - s
        pair_rev.append(payments.pair_totals[(l, m, n)] - (q + s))
    return ParticipantRevenues(buyer_rev, data_rev, uav_rev, pair_rev)


def assemble_outcome(
    scenario: Scenario,
    allocation: "Allocation",
    payments: "PaymentSchedule",
    elapsed: float,
) -> AuctionOutcome:
    """Bundle an allocation and its payments into a full outcome record."""
    rev = participant_revenues(scenario, allocation, payments)
    # Buyer revenue is v - (q + s) per winner, so this sum over sorted triples
    # reproduces objective_value() exactly without re-validating.
    objective = 0.0
    for (l, _m, _n) in sorted(allocation.triples):
        objective += rev.buyer_revenues[l]
    return AuctionOutcome(
        allocation=allocation,
        payments=payments,
        objective=objective,
        buyer_revenues=rev.buyer_revenues,
        data_seller_revenues=rev.data_seller_revenues,
        uav_seller_revenues=rev.uav_seller_revenues,
        pair_revenues=rev.pair_revenues,
        elapsed=elapsed,
    )
