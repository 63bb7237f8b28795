"""Exact winner determination against hand enumeration and the
exhaustive oracle."""

import pytest

from flmarket import (
    GenParams,
    SizeLimitError,
    brute_force_oracle,
    build_joint_bids,
    generate,
    solve_exact,
    solve_exact_excluding,
)

from conftest import hand_scenario, margin_scenario, matrices_of


def test_one_buyer_picks_best_margin(one_buyer_scenario):
    """Margins 8, 7, 5, 4 for one buyer: the 8 wins alone."""
    alloc = solve_exact(matrices_of(one_buyer_scenario))
    assert alloc.triples == {(0, 0, 0)}
    assert alloc.objective == pytest.approx(8.0)


def test_two_buyers_prefer_disjoint_pairs():
    """Margins (0,0,0)=8, (0,1,1)=7.9, (1,0,0)=7: taking the 8 blocks the
    7, so the optimum pairs 7.9 with 7 for 14.9."""
    scenario = margin_scenario(
        [
            [[8.0, -1.0], [-1.0, 7.9]],
            [[7.0, -1.0], [-1.0, -1.0]],
        ]
    )
    alloc = solve_exact(matrices_of(scenario))
    assert alloc.triples == {(0, 1, 1), (1, 0, 0)}
    assert alloc.objective == pytest.approx(14.9)


def test_all_negative_margins_yield_empty_allocation():
    scenario = margin_scenario([[[-0.5, -1.0], [-1.5, -0.1]]])
    alloc = solve_exact(matrices_of(scenario))
    assert alloc.triples == set()
    assert alloc.objective == 0.0


def test_zero_margin_pairs_stay_out():
    """A trade at exactly zero margin adds nothing and is not selected."""
    scenario = margin_scenario([[[0.0, -1.0], [-1.0, 5.0]]])
    alloc = solve_exact(matrices_of(scenario))
    assert alloc.triples == {(0, 1, 1)}


def test_exclusion_removes_physical_sellers(one_buyer_scenario):
    """Dropping data seller 0 and carrier 0 leaves only the (1, 1) pair
    at margin 4."""
    alloc = solve_exact_excluding(matrices_of(one_buyer_scenario), 0, 0)
    assert alloc.triples == {(0, 1, 1)}
    assert alloc.objective == pytest.approx(4.0)


def test_excluding_nonwinners_keeps_optimum():
    scenario = generate(GenParams(3, 4, 4, seed=5))
    matrices = build_joint_bids(scenario)
    full = solve_exact(matrices)
    used_m = {m for (_l, m, _n) in full.triples}
    used_n = {n for (_l, _m, n) in full.triples}
    for m in range(4):
        for n in range(4):
            reduced = solve_exact_excluding(matrices, m, n)
            assert reduced.objective <= full.objective + 1e-9
            if m not in used_m and n not in used_n:
                assert reduced.objective == pytest.approx(full.objective, abs=1e-9)


def test_exclusion_of_only_pair_empties_market():
    scenario = hand_scenario([[[10.0]]], [[2.0]], [[1.0]])
    alloc = solve_exact_excluding(matrices_of(scenario), 0, 0)
    assert alloc.triples == set()
    assert alloc.objective == 0.0


def test_oracle_single_candidate():
    scenario = hand_scenario([[[10.0]]], [[2.0]], [[1.0]])
    matrices = matrices_of(scenario)
    assert brute_force_oracle(matrices).objective == pytest.approx(
        solve_exact(matrices).objective
    )


def test_oracle_agreement_batch():
    """Exhaustive enumeration confirms the solver on 200 random markets."""
    for seed in range(200):
        scenario = generate(GenParams(3, 3, 3, seed=seed))
        matrices = build_joint_bids(scenario)
        exact = solve_exact(matrices)
        oracle = brute_force_oracle(matrices)
        assert exact.objective == pytest.approx(oracle.objective, abs=1e-9), (
            f"seed {seed}: solver {exact.objective} vs oracle {oracle.objective}"
        )


def test_allocation_feasibility_invariants():
    for seed in range(50):
        scenario = generate(GenParams(4, 3, 5, seed=seed))
        matrices = build_joint_bids(scenario)
        alloc = solve_exact(matrices)
        buyers = [l for (l, _m, _n) in alloc.triples]
        data = [m for (_l, m, _n) in alloc.triples]
        uavs = [n for (_l, _m, n) in alloc.triples]
        assert len(buyers) == len(set(buyers))
        assert len(data) == len(set(data))
        assert len(uavs) == len(set(uavs))
        for (l, m, n) in alloc.triples:
            e = matrices[l].entry(m, n)
            assert e.feasible
            assert e.valuation - e.joint_bid > 0.0


def test_determinism_returns_identical_triples():
    scenario = generate(GenParams(4, 4, 4, seed=77))
    matrices = build_joint_bids(scenario)
    first = solve_exact(matrices)
    second = solve_exact(matrices)
    assert first.triples == second.triples
    assert first.objective == second.objective


def test_tie_breaking_is_lexicographic():
    """Two disjoint optima of equal value: the smaller triple set wins."""
    scenario = margin_scenario(
        [
            [[5.0, -1.0], [-1.0, 5.0]],
        ]
    )
    alloc = solve_exact(matrices_of(scenario))
    assert alloc.triples == {(0, 0, 0)}


def test_solver_size_guard():
    scenario = generate(GenParams(1, 21, 1, seed=0))
    with pytest.raises(SizeLimitError):
        solve_exact(build_joint_bids(scenario))


def test_oracle_size_guard():
    scenario = generate(GenParams(6, 6, 6, seed=0))
    with pytest.raises(SizeLimitError):
        brute_force_oracle(build_joint_bids(scenario))


def test_nonpositive_joint_quotes_never_win():
    """A pair quoting zero or less is shut out even when its margin tops
    the list; solver and oracle agree on the restriction."""
    scenario = hand_scenario(
        valuations=[[[10.0], [9.0]]],
        data_bids=[[1.0], [1.0]],
        uav_bids=[[1.0]],
    )
    scenario.data_sellers[0].sell_bids[0] = -1.0  # joint quote 0.0
    matrices = matrices_of(scenario)
    alloc = solve_exact(matrices)
    assert alloc.triples == {(0, 1, 0)}
    assert brute_force_oracle(matrices).triples == {(0, 1, 0)}
