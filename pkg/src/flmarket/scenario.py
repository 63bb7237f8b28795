"""Random market generation and the scenario file format.

Reproducibility contract
------------------------
Draws come from numpy's PCG64 generator seeded with the scenario seed
(``np.random.Generator(np.random.PCG64(seed))``); uniform values use
``Generator.uniform``, i.e. ``low + (high - low) * u`` on unit draws.
The draw order is part of the contract and never changes:

1. per buyer:        model size, then alpha1
2. per data seller:  L normalized data sizes, then L unit costs
3. per UAV seller:   M distances, then the unit fly cost, then L rates
4. bid factors when ``truthful`` is off: one per data seller, then one
   per UAV seller

Data sizes are drawn in normalized units and stored raw (times
``data_unit_scale``); valuations divide the raw size by the same scale,
so the two representations stay consistent.

File format
-----------
Scenarios serialize to JSON tagged ``flmarket-scenario/1`` with every
real number written as its shortest round-tripping decimal string, so
``load(save(s)) == s`` holds exactly. Files are written with sorted keys
and a fixed layout; identical scenarios produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .market import (
    BuyerRequest,
    DataSellerBid,
    Scenario,
    UavSellerBid,
    buyer_valuation,
    flying_cost,
    service_cost,
    uav_total_cost,
)

__all__ = [
    "SCHEMA_VERSION",
    "ScenarioFormatError",
    "ScenarioValidationError",
    "GenParams",
    "generate",
    "validate_scenario",
    "save",
    "load",
]

SCHEMA_VERSION = "flmarket-scenario/1"

_REL_TOL = 1e-12


class ScenarioFormatError(ValueError):
    """The file is not a readable scenario (bad JSON, missing or mistyped field)."""


class ScenarioValidationError(ValueError):
    """The file parsed but the scenario it describes is inconsistent."""


@dataclass
class GenParams:
    """Knobs for :func:`generate`; defaults give the standard random market."""

    n_buyers: int
    n_data_sellers: int
    n_uav_sellers: int
    seed: int = 0
    data_size_range: tuple[float, float] = (10.0, 30.0)  # normalized units
    data_unit_scale: float = 500.0
    unit_cost_range: tuple[float, float] = (0.0002, 0.0004)  # per raw sample
    distance_range: tuple[float, float] = (10.0, 100.0)
    unit_fly_cost_range: tuple[float, float] = (0.02, 0.05)
    model_size_range: tuple[float, float] = (100.0, 500.0)  # KB
    rate_range: tuple[float, float] = (100.0, 300.0)  # KB/s
    alpha1_range: tuple[float, float] = (8.0, 12.0)
    alpha2: float = 1.0
    required_data: float = 5000.0  # raw samples
    truthful: bool = True
    untruthful_factor_range: tuple[float, float] = (0.8, 1.2)

    def validate(self) -> None:
        if min(self.n_buyers, self.n_data_sellers, self.n_uav_sellers) < 1:
            raise ValueError("market sizes must all be >= 1")
        for name in ("data_size_range", "unit_cost_range", "unit_fly_cost_range",
                     "model_size_range", "rate_range", "alpha1_range",
                     "untruthful_factor_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must satisfy 0 < low <= high, got ({lo}, {hi})")
        lo, hi = self.distance_range
        if not 0 <= lo <= hi:
            raise ValueError(f"distance_range must satisfy 0 <= low <= high, got ({lo}, {hi})")
        if self.data_unit_scale <= 0:
            raise ValueError(f"data_unit_scale must be > 0, got {self.data_unit_scale}")
        if self.alpha2 <= 0:
            raise ValueError(f"alpha2 must be > 0, got {self.alpha2}")
        if self.required_data <= 0:
            raise ValueError(f"required_data must be > 0, got {self.required_data}")


def generate(params: GenParams) -> Scenario:
    """Draw a full market instance; see the module docstring for the order."""
    params.validate()
    rng = np.random.Generator(np.random.PCG64(params.seed))
    L, M, N = params.n_buyers, params.n_data_sellers, params.n_uav_sellers

    def u(rng_range: tuple[float, float]) -> float:
        return float(rng.uniform(rng_range[0], rng_range[1]))

    model_sizes = []
    alpha1s = []
    for _l in range(L):
        model_sizes.append(u(params.model_size_range))
        alpha1s.append(u(params.alpha1_range))

    data_sellers = []
    for m in range(M):
        sizes = [u(params.data_size_range) * params.data_unit_scale for _l in range(L)]
        units = [u(params.unit_cost_range) for _l in range(L)]
        costs = [units[l] * sizes[l] for l in range(L)]
        data_sellers.append(
            DataSellerBid(
                seller_id=m,
                data_sizes=sizes,
                unit_costs=units,
                sell_bids=list(costs),
                true_costs=costs,
            )
        )

    uav_sellers = []
    for n in range(N):
        distances = [u(params.distance_range) for _m in range(M)]
        lam = u(params.unit_fly_cost_range)
        rates = [u(params.rate_range) for _l in range(L)]
        service_params = [(model_sizes[l], rates[l]) for l in range(L)]
        costs = [
            [
                uav_total_cost(
                    flying_cost(lam, distances[m]),
                    service_cost(model_sizes[l], rates[l]),
                )
                for l in range(L)
            ]
            for m in range(M)
        ]
        uav_sellers.append(
            UavSellerBid(
                seller_id=n,
                distances=distances,
                unit_fly_cost=lam,
                service_params=service_params,
                true_costs=costs,
                sell_bids=[list(row) for row in costs],
            )
        )

    if not params.truthful:
        for ds in data_sellers:
            f = u(params.untruthful_factor_range)
            ds.sell_bids = [c * f for c in ds.true_costs]
        for uav in uav_sellers:
            f = u(params.untruthful_factor_range)
            uav.sell_bids = [[c * f for c in row] for row in uav.true_costs]

    buyers = []
    for l in range(L):
        buyer = BuyerRequest(
            buyer_id=l,
            required_data=params.required_data,
            valuation_alpha1=alpha1s[l],
            valuation_alpha2=params.alpha2,
            valuations=[],
        )
        buyer.valuations = [
            [
                buyer_valuation(buyer, data_sellers[m].data_sizes[l], params.data_unit_scale)
                for _n in range(N)
            ]
            for m in range(M)
        ]
        buyers.append(buyer)

    scenario = Scenario(
        buyers=buyers,
        data_sellers=data_sellers,
        uav_sellers=uav_sellers,
        data_unit_scale=params.data_unit_scale,
        seed=params.seed,
    )
    validate_scenario(scenario)
    return scenario


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise ScenarioValidationError(f"{field_name}: {message}")


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _REL_TOL * max(1.0, abs(a), abs(b))


def validate_scenario(scenario: Scenario) -> None:
    """Check every structural invariant; raises naming the offending field."""
    L, M, N = scenario.n_buyers, scenario.n_data_sellers, scenario.n_uav_sellers
    _require(L >= 1 and M >= 1 and N >= 1, "scenario", "needs at least one of each party")
    _require(scenario.data_unit_scale > 0, "data_unit_scale", "must be > 0")

    for m, ds in enumerate(scenario.data_sellers):
        where = f"data_sellers[{m}]"
        _require(ds.seller_id == m, f"{where}.seller_id", f"must be {m}")
        for name in ("data_sizes", "unit_costs", "sell_bids", "true_costs"):
            _require(len(getattr(ds, name)) == L, f"{where}.{name}", f"must have length {L}")
        for l in range(L):
            _require(ds.data_sizes[l] >= 0, f"{where}.data_sizes[{l}]", "must be >= 0")
            _require(ds.unit_costs[l] > 0, f"{where}.unit_costs[{l}]", "must be > 0")
            _require(ds.sell_bids[l] > 0, f"{where}.sell_bids[{l}]", "must be > 0")
            _require(
                _close(ds.true_costs[l], ds.unit_costs[l] * ds.data_sizes[l]),
                f"{where}.true_costs[{l}]",
                "must equal unit_costs * data_sizes",
            )

    for n, uav in enumerate(scenario.uav_sellers):
        where = f"uav_sellers[{n}]"
        _require(uav.seller_id == n, f"{where}.seller_id", f"must be {n}")
        _require(len(uav.distances) == M, f"{where}.distances", f"must have length {M}")
        _require(uav.unit_fly_cost > 0, f"{where}.unit_fly_cost", "must be > 0")
        _require(
            len(uav.service_params) == L, f"{where}.service_params", f"must have length {L}"
        )
        for l, (size_kb, rate) in enumerate(uav.service_params):
            _require(size_kb > 0, f"{where}.service_params[{l}][0]", "must be > 0")
            _require(rate > 0, f"{where}.service_params[{l}][1]", "must be > 0")
        for name in ("true_costs", "sell_bids"):
            table = getattr(uav, name)
            _require(len(table) == M, f"{where}.{name}", f"must have {M} rows")
            for m, row in enumerate(table):
                _require(len(row) == L, f"{where}.{name}[{m}]", f"must have length {L}")
        for m in range(M):
            _require(uav.distances[m] >= 0, f"{where}.distances[{m}]", "must be >= 0")
            for l in range(L):
                _require(
                    uav.sell_bids[m][l] > 0, f"{where}.sell_bids[{m}][{l}]", "must be > 0"
                )
                size_kb, rate = uav.service_params[l]
                expected = uav.unit_fly_cost * uav.distances[m] + size_kb / rate
                _require(
                    _close(uav.true_costs[m][l], expected),
                    f"{where}.true_costs[{m}][{l}]",
                    "must equal flying plus service cost",
                )

    for l, buyer in enumerate(scenario.buyers):
        where = f"buyers[{l}]"
        _require(buyer.buyer_id == l, f"{where}.buyer_id", f"must be {l}")
        _require(buyer.required_data > 0, f"{where}.required_data", "must be > 0")
        _require(buyer.valuation_alpha1 > 0, f"{where}.valuation_alpha1", "must be > 0")
        _require(buyer.valuation_alpha2 > 0, f"{where}.valuation_alpha2", "must be > 0")
        _require(len(buyer.valuations) == M, f"{where}.valuations", f"must have {M} rows")
        for m, row in enumerate(buyer.valuations):
            _require(len(row) == N, f"{where}.valuations[{m}]", f"must have length {N}")
            meets_floor = scenario.data_sellers[m].data_sizes[l] >= buyer.required_data
            for n, v in enumerate(row):
                spot = f"{where}.valuations[{m}][{n}]"
                _require(v >= 0, spot, "must be >= 0")
                if meets_floor:
                    _require(v > 0, spot, "must be > 0 when the data floor is met")
                else:
                    _require(v == 0.0, spot, "must be exactly 0 below the data floor")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _enc(x: float) -> str:
    return repr(float(x))


def _scenario_to_doc(scenario: Scenario) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "seed": scenario.seed,
        "data_unit_scale": _enc(scenario.data_unit_scale),
        "buyers": [
            {
                "buyer_id": b.buyer_id,
                "required_data": _enc(b.required_data),
                "valuation_alpha1": _enc(b.valuation_alpha1),
                "valuation_alpha2": _enc(b.valuation_alpha2),
                "valuations": [[_enc(v) for v in row] for row in b.valuations],
            }
            for b in scenario.buyers
        ],
        "data_sellers": [
            {
                "seller_id": d.seller_id,
                "data_sizes": [_enc(v) for v in d.data_sizes],
                "unit_costs": [_enc(v) for v in d.unit_costs],
                "sell_bids": [_enc(v) for v in d.sell_bids],
                "true_costs": [_enc(v) for v in d.true_costs],
            }
            for d in scenario.data_sellers
        ],
        "uav_sellers": [
            {
                "seller_id": u.seller_id,
                "distances": [_enc(v) for v in u.distances],
                "unit_fly_cost": _enc(u.unit_fly_cost),
                "service_params": [[_enc(a), _enc(b)] for (a, b) in u.service_params],
                "true_costs": [[_enc(v) for v in row] for row in u.true_costs],
                "sell_bids": [[_enc(v) for v in row] for row in u.sell_bids],
            }
            for u in scenario.uav_sellers
        ],
    }


def save(scenario: Scenario, path: str | Path) -> None:
    """Write the scenario as deterministic, lossless JSON."""
    doc = _scenario_to_doc(scenario)
    Path(path).write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


class _Reader:
    """Typed field access that reports the full path of whatever is wrong."""

    def __init__(self, doc, path: str):
        self.doc = doc
        self.path = path

    def child(self, key):
        try:
            return _Reader(self.doc[key], f"{self.path}.{key}")
        except (KeyError, IndexError, TypeError):
            raise ScenarioFormatError(f"missing or unreadable field {self.path}.{key}") from None

    def items(self):
        if not isinstance(self.doc, list):
            raise ScenarioFormatError(f"field {self.path} must be a list")
        return [_Reader(v, f"{self.path}[{i}]") for i, v in enumerate(self.doc)]

    def as_int(self) -> int:
        if not isinstance(self.doc, int) or isinstance(self.doc, bool):
            raise ScenarioFormatError(f"field {self.path} must be an integer")
        return self.doc

    def as_real(self) -> float:
        if isinstance(self.doc, str):
            try:
                return float(self.doc)
            except ValueError:
                pass
        raise ScenarioFormatError(f"field {self.path} must be a decimal string")

    def real_list(self) -> list[float]:
        return [r.as_real() for r in self.items()]

    def real_table(self) -> list[list[float]]:
        return [r.real_list() for r in self.items()]


def load(path: str | Path) -> Scenario:
    """Read, type-check and validate a scenario file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioFormatError(f"cannot read {path}: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioFormatError(
            f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None

    root = _Reader(doc, "scenario")
    version = root.child("version").doc
    if version != SCHEMA_VERSION:
        raise ScenarioFormatError(
            f"field scenario.version must be {SCHEMA_VERSION!r}, got {version!r}"
        )

    buyers = []
    for r in root.child("buyers").items():
        buyers.append(
            BuyerRequest(
                buyer_id=r.child("buyer_id").as_int(),
                required_data=r.child("required_data").as_real(),
                valuation_alpha1=r.child("valuation_alpha1").as_real(),
                valuation_alpha2=r.child("valuation_alpha2").as_real(),
                valuations=r.child("valuations").real_table(),
            )
        )
    data_sellers = []
    for r in root.child("data_sellers").items():
        data_sellers.append(
            DataSellerBid(
                seller_id=r.child("seller_id").as_int(),
                data_sizes=r.child("data_sizes").real_list(),
                unit_costs=r.child("unit_costs").real_list(),
                sell_bids=r.child("sell_bids").real_list(),
                true_costs=r.child("true_costs").real_list(),
            )
        )
    uav_sellers = []
    for r in root.child("uav_sellers").items():
        pairs = []
        for p in r.child("service_params").items():
            row = p.real_list()
            if len(row) != 2:
                raise ScenarioFormatError(
                    f"field {p.path} must hold exactly [model_size_kb, rate_kbps]"
                )
            pairs.append((row[0], row[1]))
        uav_sellers.append(
            UavSellerBid(
                seller_id=r.child("seller_id").as_int(),
                distances=r.child("distances").real_list(),
                unit_fly_cost=r.child("unit_fly_cost").as_real(),
                service_params=pairs,
                true_costs=r.child("true_costs").real_table(),
                sell_bids=r.child("sell_bids").real_table(),
            )
        )

    scenario = Scenario(
        buyers=buyers,
        data_sellers=data_sellers,
        uav_sellers=uav_sellers,
        data_unit_scale=root.child("data_unit_scale").as_real(),
        seed=root.child("seed").as_int(),
    )
    validate_scenario(scenario)
    return scenario
