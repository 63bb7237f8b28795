"""Virtual seller pairs.

The mechanisms never price a data seller or a UAV on its own: for each
buyer, every (data seller, UAV seller) combination acts as one virtual
seller quoting the sum of the two component bids. This module flattens a
scenario into one joint-bid matrix per buyer; everything downstream
(winner determination, payments, preference lists) works off these
matrices only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .market import Scenario

__all__ = ["SellerPairBid", "JointBidMatrix", "build_joint_bids"]


@dataclass(slots=True)
class SellerPairBid:
    """One virtual pair's quote for one buyer."""

    buyer_id: int
    data_seller_id: int
    uav_seller_id: int
    data_bid: float
    uav_bid: float
    joint_bid: float
    valuation: float
    feasible: bool  # data on offer meets the buyer's floor


@dataclass
class JointBidMatrix:
    """All virtual pair quotes for one buyer, indexed [data_seller][uav_seller]."""

    buyer_id: int
    entries: list[list[SellerPairBid]]

    def entry(self, data_seller: int, uav_seller: int) -> SellerPairBid:
        return self.entries[data_seller][uav_seller]


def build_joint_bids(scenario: Scenario) -> list[JointBidMatrix]:
    """One joint-bid matrix per buyer, in buyer order.

    Infeasible combinations (offer below the buyer's floor) are kept with
    their zero valuation and flagged, so matrix shape is always M x N.
    """
    uav_sellers = scenario.uav_sellers
    matrices = []
    for buyer in scenario.buyers:
        l = buyer.buyer_id
        required = buyer.required_data
        valuations = buyer.valuations
        rows = []
        for m, ds in enumerate(scenario.data_sellers):
            q = ds.sell_bids[l]
            feasible = ds.data_sizes[l] >= required
            vrow = valuations[m]
            row = [
                SellerPairBid(l, m, n, q, s, q + s, vrow[n], feasible)
                for n, s in enumerate(uav.sell_bids[m][l] for uav in uav_sellers)
            ]
            rows.append(row)
        matrices.append(JointBidMatrix(buyer_id=l, entries=rows))
    return matrices
