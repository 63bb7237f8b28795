"""Marginal-contribution payments on the exact auction."""

import pytest

from flmarket import (
    GenParams,
    build_joint_bids,
    generate,
    run_matching,
    run_vcg,
    solve_exact,
    split_payment,
    vcg_pair_payment,
)

from conftest import hand_scenario


def test_pair_payment_formula():
    assert vcg_pair_payment(8.0, 4.0, 2.0) == pytest.approx(6.0)
    assert vcg_pair_payment(10.0, 7.0, 4.5) == pytest.approx(7.5)


def test_pair_payment_zero_marginal_contribution():
    assert vcg_pair_payment(5.0, 5.0, 3.0) == pytest.approx(3.0)


def test_pair_payment_rejects_inverted_objectives():
    with pytest.raises(ValueError):
        vcg_pair_payment(4.0, 8.0, 2.0)


def test_split_matches_published_row():
    """total 3.2562 over quotes 2.4433 / 0.8124 lands on the printed
    2.4437 / 0.8125 split."""
    data_share, uav_share = split_payment(3.2562, 2.4433, 0.8124)
    assert data_share == pytest.approx(2.4437, abs=1e-4)
    assert uav_share == pytest.approx(0.8125, abs=1e-4)


def test_split_breaks_even_at_joint_bid():
    data_share, uav_share = split_payment(4.0, 2.5, 1.5)
    assert data_share == pytest.approx(2.5)
    assert uav_share == pytest.approx(1.5)


def test_split_symmetric_bids():
    assert split_payment(10.0, 2.5, 2.5) == (5.0, 5.0)


def test_split_sums_exactly():
    for total, q, s in [(3.2562, 2.4433, 0.8124), (7.0, 0.1, 5.3), (1e-6, 2.0, 3.0)]:
        data_share, uav_share = split_payment(total, q, s)
        assert data_share + uav_share == total


def test_split_rejects_nonpositive_joint_bid():
    with pytest.raises(ValueError):
        split_payment(3.0, -2.0, 1.0)


def test_worked_example(one_buyer_scenario):
    """Margins 8, 7, 5, 4; excluding the winner's sellers leaves margin 4,
    so the winner is paid 8 - 4 + 2 = 6 and keeps 4."""
    outcome = run_vcg(one_buyer_scenario)
    assert outcome.allocation.triples == {(0, 0, 0)}
    assert outcome.payments.pair_totals[(0, 0, 0)] == pytest.approx(6.0)
    assert outcome.pair_revenues[0] == pytest.approx(4.0)
    # quotes are 1 and 1, so the settlement is an even split
    assert outcome.payments.data_seller_payments[0] == pytest.approx(3.0)
    assert outcome.payments.uav_seller_payments[0] == pytest.approx(3.0)


def test_sole_pair_is_paid_the_valuation():
    scenario = hand_scenario([[[10.0]]], [[2.0]], [[1.0]])
    outcome = run_vcg(scenario)
    assert outcome.payments.pair_totals[(0, 0, 0)] == pytest.approx(10.0)
    assert outcome.pair_revenues[0] == pytest.approx(7.0)


def test_empty_market_outcome():
    scenario = hand_scenario([[[1.0]]], [[2.0]], [[1.0]])  # margin -2
    outcome = run_vcg(scenario)
    assert outcome.allocation.triples == set()
    assert outcome.objective == 0.0
    assert outcome.payments.pair_totals == {}
    assert all(p == 0.0 for p in outcome.payments.data_seller_payments)
    assert all(p == 0.0 for p in outcome.payments.uav_seller_payments)


def test_individual_rationality_batch():
    """Payments cover joint quotes and every share covers its bid."""
    for seed in range(100):
        scenario = generate(GenParams(4, 4, 4, seed=seed))
        outcome = run_vcg(scenario)
        for (l, m, n) in outcome.allocation.sorted_triples():
            q = scenario.data_sellers[m].sell_bids[l]
            s = scenario.uav_sellers[n].sell_bids[m][l]
            total = outcome.payments.pair_totals[(l, m, n)]
            assert total >= q + s - 1e-9
            assert outcome.payments.data_seller_payments[m] >= q - 1e-9
            assert outcome.payments.uav_seller_payments[n] >= s - 1e-9


def test_payment_decomposition():
    for seed in range(50):
        scenario = generate(GenParams(4, 4, 4, seed=seed))
        outcome = run_vcg(scenario)
        total = sum(outcome.payments.pair_totals.values())
        split = sum(outcome.payments.data_seller_payments) + sum(
            outcome.payments.uav_seller_payments
        )
        assert total == pytest.approx(split, abs=1e-9)


def test_allocation_is_the_exact_optimum():
    for seed in range(30):
        scenario = generate(GenParams(3, 4, 3, seed=seed))
        outcome = run_vcg(scenario)
        alloc = solve_exact(build_joint_bids(scenario))
        assert outcome.allocation.triples == alloc.triples
        assert outcome.objective == pytest.approx(alloc.objective, abs=1e-9)


def test_objective_dominates_matching():
    for seed in range(60):
        scenario = generate(GenParams(4, 4, 4, seed=seed))
        assert run_vcg(scenario).objective >= run_matching(scenario).objective - 1e-9
