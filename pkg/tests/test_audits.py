"""Property audits: positive controls on the shipped mechanisms and
negative controls proving the audits can actually catch bad designs."""

import pytest

from flmarket import (
    AuditReport,
    assemble_outcome,
    build_joint_bids,
    derive_seed,
    empty_payments,
    individual_rationality_audit,
    run_vcg,
    solve_exact,
    stability_audit,
    truthfulness_audit,
)

from conftest import hand_scenario


def test_derive_seed_deterministic():
    assert derive_seed(42, 1, 2) == derive_seed(42, 1, 2)
    assert derive_seed(42, 1, 2) != derive_seed(42, 2, 1)
    assert derive_seed(0, 0) != derive_seed(1, 0)
    assert 0 <= derive_seed(7, 3) < 2**64


def test_truthfulness_passes_on_shipped_mechanisms():
    report = truthfulness_audit(6, (3, 3, 3), grid_points=7, seed=1)
    assert report.passed
    assert report.scenarios_tested == 6
    assert report.checks_tested > 0
    assert report.kind == "truthfulness"
    assert report.mechanisms == ["matching", "vcg"]
    assert report.size == (3, 3, 3)
    assert report.seed == 1


def test_ir_passes_on_shipped_mechanisms():
    report = individual_rationality_audit(20, (4, 4, 4), seed=2)
    assert report.passed
    assert report.scenarios_tested == 20


def test_stability_passes():
    report = stability_audit(20, (4, 4, 4), seed=3)
    assert report.passed
    assert report.mechanisms == ["matching"]


def _underpaying_mechanism(scenario):
    """Correct allocation, then 1000.0 is docked from every pair total."""
    outcome = run_vcg(scenario)
    for key in outcome.payments.pair_totals:
        outcome.payments.pair_totals[key] -= 1000.0
    return outcome


def test_ir_audit_catches_underpayment():
    report = individual_rationality_audit(
        5, (3, 3, 3), seed=4, mechanisms={"docked": _underpaying_mechanism}
    )
    assert not report.passed
    v = report.violations[0]
    assert v.mechanism == "docked"
    assert "negative" in v.check
    line = v.describe()
    assert "docked" in line and "seed=" in line


def _first_price_mechanism(scenario):
    """Pays every winning pair exactly its joint quote, split at face value."""
    matrices = build_joint_bids(scenario)
    allocation = solve_exact(matrices)
    payments = empty_payments(scenario.n_data_sellers, scenario.n_uav_sellers)
    for (l, m, n) in allocation.sorted_triples():
        q = scenario.data_sellers[m].sell_bids[l]
        s = scenario.uav_sellers[n].sell_bids[m][l]
        payments.pair_totals[(l, m, n)] = q + s
        payments.data_seller_payments[m] += q
        payments.uav_seller_payments[n] += s
    return assemble_outcome(scenario, allocation, payments, 0.0)


def _single_pair_scenario():
    # one buyer, one pair: v = 10, joint quote 1 + 1 = 2
    return hand_scenario(
        valuations=[[[10.0]]],
        data_bids=[[1.0]],
        uav_bids=[[1.0]],
    )


def test_truthfulness_audit_catches_first_price():
    """Paying the quote invites overbidding: every grid factor above 1
    raises the sole pair's payment and the audit must flag each one."""
    scenario = _single_pair_scenario()
    report = truthfulness_audit(
        1,
        (1, 1, 1),
        grid_points=21,
        mechanisms={"first-price": _first_price_mechanism},
        scenarios=[scenario],
    )
    assert not report.passed
    overbid_factors = [f for f in (0.2 + 0.14 * k for k in range(21)) if f > 1.0 + 1e-12]
    assert len(report.violations) == len(overbid_factors)
    for v in report.violations:
        assert v.mechanism == "first-price"
        assert v.observed > v.expected


def test_first_price_still_individually_rational():
    """Same broken-by-design mechanism: IR holds even though
    truthfulness does not, so the two audits measure different things."""
    report = individual_rationality_audit(
        5,
        (3, 3, 3),
        seed=5,
        mechanisms={"first-price": _first_price_mechanism},
    )
    assert report.passed


def test_truthfulness_passes_on_single_pair_vcg():
    scenario = _single_pair_scenario()
    report = truthfulness_audit(1, (1, 1, 1), scenarios=[scenario])
    assert report.passed


def test_audit_accepts_explicit_scenarios():
    scenario = _single_pair_scenario()
    report = individual_rationality_audit(99, (1, 1, 1), scenarios=[scenario, scenario])
    assert report.scenarios_tested == 2


def test_report_passed_property():
    report = AuditReport(
        kind="truthfulness", mechanisms=["vcg"], scenarios_tested=0,
        checks_tested=0, seed=0, size=(1, 1, 1),
    )
    assert report.passed
