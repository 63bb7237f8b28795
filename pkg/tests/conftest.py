"""Shared builders for hand-crafted market instances.

Hand instances keep UAV cost structure trivial (zero flight legs, unit
service rate) so any per-buyer carrier quote is consistent with the
flying-plus-service identity; the interesting numbers live entirely in
the valuation and bid tables a test passes in.
"""

import pytest

from flmarket import (
    BuyerRequest,
    DataSellerBid,
    Scenario,
    UavSellerBid,
    build_joint_bids,
)


def hand_scenario(
    valuations,
    data_bids,
    uav_bids,
    required=1.0,
    infeasible=(),
    data_true=None,
    uav_true=None,
    seed=0,
):
    """Scenario from explicit tables.

    ``valuations[l][m][n]`` is buyer l's value for the (m, n) pair,
    ``data_bids[m][l]`` the data seller quotes, ``uav_bids[n][l]`` the
    carrier quotes (identical toward every data seller). True costs
    default to the bids. ``infeasible`` lists (m, l) offers kept below
    buyer l's data floor; their valuations must be 0 in the table.
    """
    L = len(valuations)
    M = len(data_bids)
    N = len(uav_bids)
    data_true = data_true if data_true is not None else data_bids
    uav_true = uav_true if uav_true is not None else uav_bids
    infeasible = set(infeasible)

    data_sellers = []
    for m in range(M):
        sizes = [required / 2.0 if (m, l) in infeasible else required for l in range(L)]
        data_sellers.append(
            DataSellerBid(
                seller_id=m,
                data_sizes=sizes,
                unit_costs=[data_true[m][l] / sizes[l] for l in range(L)],
                sell_bids=list(data_bids[m]),
                true_costs=list(data_true[m]),
            )
        )

    uav_sellers = []
    for n in range(N):
        uav_sellers.append(
            UavSellerBid(
                seller_id=n,
                distances=[0.0] * M,
                unit_fly_cost=1.0,
                service_params=[(uav_true[n][l], 1.0) for l in range(L)],
                true_costs=[[uav_true[n][l] for l in range(L)] for _ in range(M)],
                sell_bids=[[uav_bids[n][l] for l in range(L)] for _ in range(M)],
            )
        )

    buyers = [
        BuyerRequest(
            buyer_id=l,
            required_data=required,
            valuation_alpha1=1.0,
            valuation_alpha2=1.0,
            valuations=[list(valuations[l][m]) for m in range(M)],
        )
        for l in range(L)
    ]
    return Scenario(
        buyers=buyers,
        data_sellers=data_sellers,
        uav_sellers=uav_sellers,
        data_unit_scale=1.0,
        seed=seed,
    )


def margin_scenario(margins, joint=2.0, seed=0):
    """Scenario whose pair margins R equal ``margins[l][m][n]`` exactly.

    Every quote is half of ``joint`` on each side; valuations are set to
    margin + joint, so margins below -joint are not representable (the
    valuation would go negative).
    """
    L = len(margins)
    M = len(margins[0])
    N = len(margins[0][0])
    half = joint / 2.0
    valuations = [
        [[margins[l][m][n] + joint for n in range(N)] for m in range(M)]
        for l in range(L)
    ]
    for l in range(L):
        for m in range(M):
            for n in range(N):
                if valuations[l][m][n] <= 0.0:
                    raise ValueError("margin below -joint is not representable")
    return hand_scenario(
        valuations=valuations,
        data_bids=[[half] * L for _ in range(M)],
        uav_bids=[[half] * L for _ in range(N)],
        seed=seed,
    )


@pytest.fixture
def one_buyer_scenario():
    """Single buyer, 2x2 pairs with margins 8, 7, 5, 4.

    Valuation 10 for data seller 0, 9 for data seller 1; quotes chosen so
    the joint bids are 2, 3, 4, 5. The best pair is (0, 0) at margin 8,
    the runner up (0, 1) at 7.
    """
    return hand_scenario(
        valuations=[[[10.0, 10.0], [9.0, 9.0]]],
        data_bids=[[1.0], [3.0]],
        uav_bids=[[1.0], [2.0]],
    )


def matrices_of(scenario):
    return build_joint_bids(scenario)
