"""Reverse-auction engine for a drone-assisted federated-learning data market.

Buyers request model training, data sellers offer local data sets, UAV
sellers offer collection and relay. The package pairs the two seller
sides into joint bids, solves winner determination exactly or by greedy
matching, prices the winners (marginal-contribution payments for the
exact auction, critical-value payments for the matching), and ships a
seeded experiment harness with executable audits of truthfulness,
individual rationality and stability.
"""

from .audits import (
    AuditReport,
    AuditViolation,
    derive_seed,
    individual_rationality_audit,
    stability_audit,
    truthfulness_audit,
)
from .baselines import FogaConfig, run_foga, run_hvpm, run_lcpm, run_rsbm
from .harness import (
    AUDIT_KINDS,
    DEFAULT_VCG_CAP,
    METHODS,
    BenchRow,
    ComparisonReport,
    MethodRow,
    TrialRecord,
    bench,
    compare,
    run_audit,
    run_method,
)
from .market import (
    AuctionOutcome,
    BuyerRequest,
    ConsistencyError,
    DataSellerBid,
    ParticipantRevenues,
    Scenario,
    UavSellerBid,
    accuracy_of_data,
    assemble_outcome,
    buyer_valuation,
    flying_cost,
    objective_value,
    participant_revenues,
    service_cost,
    uav_total_cost,
)
from .matching import (
    PreferenceEntry,
    PreferenceLists,
    abstention_critical_value,
    build_preference_lists,
    critical_value,
    greedy_match,
    matching_pair_payment,
    run_matching,
)
from .pairing import JointBidMatrix, SellerPairBid, build_joint_bids
from .scenario import (
    SCHEMA_VERSION,
    GenParams,
    ScenarioFormatError,
    ScenarioValidationError,
    generate,
    load,
    save,
    validate_scenario,
)
from .vcg import (
    PaymentSchedule,
    empty_payments,
    run_vcg,
    split_payment,
    vcg_pair_payment,
)
from .wdp import Allocation, SizeLimitError, brute_force_oracle, solve_exact, solve_exact_excluding

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # market model
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
    # pairing
    "SellerPairBid",
    "JointBidMatrix",
    "build_joint_bids",
    # winner determination
    "SizeLimitError",
    "Allocation",
    "solve_exact",
    "solve_exact_excluding",
    "brute_force_oracle",
    # exact-auction pricing
    "PaymentSchedule",
    "empty_payments",
    "vcg_pair_payment",
    "split_payment",
    "run_vcg",
    # matching mechanism
    "PreferenceEntry",
    "PreferenceLists",
    "build_preference_lists",
    "greedy_match",
    "critical_value",
    "abstention_critical_value",
    "matching_pair_payment",
    "run_matching",
    # baselines
    "FogaConfig",
    "run_hvpm",
    "run_lcpm",
    "run_rsbm",
    "run_foga",
    # scenarios
    "SCHEMA_VERSION",
    "ScenarioFormatError",
    "ScenarioValidationError",
    "GenParams",
    "generate",
    "validate_scenario",
    "save",
    "load",
    # audits
    "AuditViolation",
    "AuditReport",
    "derive_seed",
    "truthfulness_audit",
    "individual_rationality_audit",
    "stability_audit",
    # harness
    "METHODS",
    "AUDIT_KINDS",
    "DEFAULT_VCG_CAP",
    "TrialRecord",
    "MethodRow",
    "ComparisonReport",
    "BenchRow",
    "run_method",
    "compare",
    "run_audit",
    "bench",
]
