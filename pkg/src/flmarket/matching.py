"""One-sided greedy matching with critical-value payments.

A much cheaper alternative to the exact auction: rank every feasible
(buyer, data seller, UAV) combination by its margin R = valuation - joint
bid, repeatedly grant the best remaining entry, and drop everything that
conflicts with it. A winning pair is paid the buyer's valuation minus a
critical value, the margin the buyer would fall back to if the data
seller withdrew, so the pair keeps R minus that critical value and never
runs a loss; the total is split pro rata between the two sellers just as
in the exact auction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .market import AuctionOutcome, Scenario, assemble_outcome
from .pairing import JointBidMatrix, build_joint_bids
from .vcg import empty_payments, split_payment
from .wdp import Allocation

__all__ = [
    "PreferenceEntry",
    "PreferenceLists",
    "null_entry",
    "build_preference_lists",
    "greedy_match",
    "critical_value",
    "abstention_critical_value",
    "matching_pair_payment",
    "run_matching",
]


@dataclass(slots=True)
class PreferenceEntry:
    """One ranked combination; seller ids of -1 mark the terminal sentinel."""

    buyer_id: int
    data_seller_id: int
    uav_seller_id: int
    value: float

    @property
    def is_null(self) -> bool:
        return self.data_seller_id < 0


def null_entry(buyer_id: int) -> PreferenceEntry:
    """Terminal sentinel for a buyer's list: worth nothing, conflicts with nothing."""
    return PreferenceEntry(buyer_id=buyer_id, data_seller_id=-1, uav_seller_id=-1, value=0.0)


@dataclass
class PreferenceLists:
    """The auctioneer's global ranking plus each buyer's own ranking.

    Every buyer list ends with the null sentinel. Entries with a negative
    margin or an infeasible pair appear in neither list.
    """

    auctioneer_list: list[PreferenceEntry]
    buyer_lists: list[list[PreferenceEntry]]


def build_preference_lists(matrices: list[JointBidMatrix]) -> PreferenceLists:
    """Rank all feasible non-negative-margin combinations.

    Both lists sort by margin, highest first; ties break toward the
    smallest (buyer, data seller, UAV) index triple so runs are
    reproducible.
    """
    keyed: list[tuple[float, int, int, int, PreferenceEntry]] = []
    buyer_lists: list[list[PreferenceEntry]] = []
    for mat in matrices:
        l = mat.buyer_id
        mine: list[tuple[float, int, int, int, PreferenceEntry]] = []
        for m, row in enumerate(mat.entries):
            for n, e in enumerate(row):
                # non-positive joint quotes are not admitted to the market
                if not e.feasible or e.joint_bid <= 0.0:
                    continue
                margin = e.valuation - e.joint_bid
                if margin >= 0.0:
                    mine.append((-margin, l, m, n, PreferenceEntry(l, m, n, margin)))
        mine.sort()
        keyed.extend(mine)
        ordered = [k[4] for k in mine]
        ordered.append(null_entry(l))
        buyer_lists.append(ordered)
    keyed.sort()
    return PreferenceLists(
        auctioneer_list=[k[4] for k in keyed], buyer_lists=buyer_lists
    )


def greedy_match(lists: PreferenceLists) -> Allocation:
    """Grant the auctioneer list top to bottom, skipping conflicts.

    Selecting an entry consumes its buyer, its data seller and its UAV,
    which removes every other entry touching any of the three. Input
    lists are left untouched.
    """
    used_l: set[int] = set()
    used_m: set[int] = set()
    used_n: set[int] = set()
    triples: set[tuple[int, int, int]] = set()
    objective = 0.0
    for e in lists.auctioneer_list:
        if e.buyer_id in used_l or e.data_seller_id in used_m or e.uav_seller_id in used_n:
            continue
        used_l.add(e.buyer_id)
        used_m.add(e.data_seller_id)
        used_n.add(e.uav_seller_id)
        triples.add((e.buyer_id, e.data_seller_id, e.uav_seller_id))
        objective += e.value
    return Allocation(triples=triples, objective=objective)


def critical_value(buyer_list: list[PreferenceEntry], winner: PreferenceEntry) -> float:
    """Margin of the entry ranked immediately after the winner in its
    buyer's list, the sentinel's 0.0 when the winner ranks last."""
    if winner.is_null:
        raise ValueError("the null sentinel cannot win")
    for i, e in enumerate(buyer_list):
        if (
            e.buyer_id == winner.buyer_id
            and e.data_seller_id == winner.data_seller_id
            and e.uav_seller_id == winner.uav_seller_id
        ):
            return buyer_list[i + 1].value
    raise ValueError(f"winner {winner} not present in the buyer list")


def abstention_critical_value(lists: PreferenceLists, winner: PreferenceEntry) -> float:
    """Margin the winner's buyer would get if the data seller withdrew.

    Reruns the greedy grant with every entry pairing this buyer with the
    winner's data seller removed, and returns the margin the buyer is
    matched at in that market (0.0 if it goes unmatched). A data bid moves
    only the removed entries and a carrier bid moves only the winning one,
    so the result depends on no bid the winning pair controls; that is
    what makes paying ``valuation - critical`` safe against misreports.
    Never exceeds the winner's own margin: the grants above it replay
    identically, leaving the buyer free until the winner's turn.
    """
    if winner.is_null:
        raise ValueError("the null sentinel cannot win")
    used_l: set[int] = set()
    used_m: set[int] = set()
    used_n: set[int] = set()
    for e in lists.auctioneer_list:
        if e.buyer_id == winner.buyer_id:
            if e.data_seller_id == winner.data_seller_id:
                continue
            if e.data_seller_id not in used_m and e.uav_seller_id not in used_n:
                return e.value
            continue
        if e.buyer_id in used_l or e.data_seller_id in used_m or e.uav_seller_id in used_n:
            continue
        used_l.add(e.buyer_id)
        used_m.add(e.data_seller_id)
        used_n.add(e.uav_seller_id)
    return 0.0


def matching_pair_payment(valuation: float, critical: float) -> float:
    """Winners are paid the buyer's valuation less the critical margin."""
    return valuation - critical


def run_matching(scenario: Scenario) -> AuctionOutcome:
    """Full greedy-matching auction: rank, grant, price, settle."""
    start = time.perf_counter()
    matrices = build_joint_bids(scenario)
    lists = build_preference_lists(matrices)
    allocation = greedy_match(lists)
    payments = empty_payments(scenario.n_data_sellers, scenario.n_uav_sellers)
    for (l, m, n) in allocation.sorted_triples():
        entry = matrices[l].entry(m, n)
        winner = PreferenceEntry(l, m, n, entry.valuation - entry.joint_bid)
        critical = abstention_critical_value(lists, winner)
        total = matching_pair_payment(entry.valuation, critical)
        data_share, uav_share = split_payment(total, entry.data_bid, entry.uav_bid)
        payments.pair_totals[(l, m, n)] = total
        payments.data_seller_payments[m] = data_share
        payments.uav_seller_payments[n] = uav_share
    elapsed = time.perf_counter() - start
    return assemble_outcome(scenario, allocation, payments, elapsed)
