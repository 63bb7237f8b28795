"""Exact winner determination.

Picks the set of (buyer, data seller, UAV seller) triples maximizing the
sum of (valuation - joint bid), subject to every buyer, data seller and
UAV appearing at most once and every triple meeting the buyer's data
floor. Triples whose margin is zero or negative never enter an
allocation.

The solver walks buyers in index order, keeping one dynamic-programming
layer per buyer whose states pack the used data sellers and used UAVs
into a single bitmask. A greedy incumbent plus an optimistic per-layer
completion bound prunes states that provably cannot reach the optimum.
Values are computed in a backward pass; the allocation is then rebuilt
front-to-back, which makes the tie rule cheap to honor: among optimal
allocations, the lexicographically smallest sorted triple list wins.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pairing import JointBidMatrix

__all__ = [
    "SizeLimitError",
    "Allocation",
    "solve_exact",
    "solve_exact_excluding",
    "brute_force_oracle",
]

# masks are per seller side, so each side is capped independently
MAX_MASK_SELLERS = 20
MAX_ORACLE_SIZE = 5

# slack keeps borderline-optimal states alive despite float reassociation
_PRUNE_SLACK = 1e-6
_NEG_INF = float("-inf")


class SizeLimitError(ValueError):
    """Instance is larger than this solver is willing to enumerate."""


@dataclass
class Allocation:
    """A feasible set of disjoint winning triples ``(buyer, data_seller, uav)``."""

    triples: set[tuple[int, int, int]]
    objective: float

    def sorted_triples(self) -> list[tuple[int, int, int]]:
        return sorted(self.triples)


def _candidates(
    matrices: list[JointBidMatrix], skip_m: int = -1, skip_n: int = -1
) -> list[list[tuple[int, int, float]]]:
    """Per buyer, the (m, n, margin) entries worth selecting, in (m, n) order."""
    out = []
    for mat in matrices:
        row = []
        for m, entries in enumerate(mat.entries):
            if m == skip_m:
                continue
            for n, e in enumerate(entries):
                # non-positive joint quotes are not admitted to the market
                if n == skip_n or not e.feasible or e.joint_bid <= 0.0:
                    continue
                margin = e.valuation - e.joint_bid
                if margin > 0.0:
                    row.append((m, n, margin))
        out.append(row)
    return out


def _greedy_incumbent(cands: list[list[tuple[int, int, float]]]) -> float:
    flat = sorted(
        ((r, l, m, n) for l, row in enumerate(cands) for (m, n, r) in row),
        key=lambda t: (-t[0], t[1], t[2], t[3]),
    )
    used_l: set[int] = set()
    used_m: set[int] = set()
    used_n: set[int] = set()
    total = 0.0
    for (r, l, m, n) in flat:
        if l in used_l or m in used_m or n in used_n:
            continue
        used_l.add(l)
        used_m.add(m)
        used_n.add(n)
        total += r
    return total


def _solve(cands: list[list[tuple[int, int, float]]], n_uav: int) -> Allocation:
    n_layers = len(cands)
    # per-candidate bit pattern: one bit for the data seller, one for the UAV
    prepared = [
        [((1 << (n_uav + m)) | (1 << n), r, m, n) for (m, n, r) in row]
        for row in cands
    ]
    incumbent = _greedy_incumbent(cands)
    suffix_bound = [0.0] * (n_layers + 1)
    for l in range(n_layers - 1, -1, -1):
        best_r = max((r for (_m, _n, r) in cands[l]), default=0.0)
        suffix_bound[l] = suffix_bound[l + 1] + best_r

    # forward pass: best value into each reachable state, bound-pruned
    fwd: list[dict[int, float]] = [{} for _ in range(n_layers + 1)]
    fwd[0][0] = 0.0
    for l in range(n_layers):
        cur = fwd[l]
        nxt = fwd[l + 1]
        limit = incumbent - _PRUNE_SLACK
        bound = suffix_bound[l + 1]
        for s, val in cur.items():
            if val + bound >= limit:
                prev = nxt.get(s, _NEG_INF)
                if val > prev:
                    nxt[s] = val
            for (bits, r, _m, _n) in prepared[l]:
                if s & bits == 0:
                    v = val + r
                    if v + bound < limit:
                        continue
                    s2 = s | bits
                    prev = nxt.get(s2, _NEG_INF)
                    if v > prev:
                        nxt[s2] = v

    # backward pass: best completion value from each surviving state
    back: list[dict[int, float]] = [{} for _ in range(n_layers + 1)]
    back[n_layers] = {s: 0.0 for s in fwd[n_layers]}
    for l in range(n_layers - 1, -1, -1):
        nxt = back[l + 1]
        cur: dict[int, float] = {}
        for s in fwd[l]:
            best = nxt.get(s, _NEG_INF)
            for (bits, r, _m, _n) in prepared[l]:
                if s & bits == 0:
                    v = nxt.get(s | bits, _NEG_INF)
                    if v != _NEG_INF and r + v > best:
                        best = r + v
            cur[s] = best
        back[l] = cur

    # rebuild front-to-back; taking the smallest (m, n) that still reaches
    # the optimum at each buyer yields the lexicographically smallest list
    triples: set[tuple[int, int, int]] = set()
    s = 0
    for l in range(n_layers):
        target = back[l][s]
        nxt = back[l + 1]
        chosen = None
        for (bits, r, m, n) in prepared[l]:
            if s & bits == 0:
                v = nxt.get(s | bits, _NEG_INF)
                if v != _NEG_INF and r + v == target:
                    chosen = (m, n, bits)
                    break
        if chosen is None:
            assert nxt.get(s, _NEG_INF) == target, "no transition reaches the optimum"
        else:
            triples.add((l, chosen[0], chosen[1]))
            s |= chosen[2]

    objective = back[0][0] if n_layers else 0.0
    if objective == _NEG_INF:  # pragma: no cover - defensive
        objective = 0.0
    return Allocation(triples=triples, objective=objective)


def _check_sides(matrices: list[JointBidMatrix]) -> tuple[int, int]:
    if not matrices or not matrices[0].entries:
        return 0, 0
    n_data = len(matrices[0].entries)
    n_uav = len(matrices[0].entries[0])
    if n_data > MAX_MASK_SELLERS or n_uav > MAX_MASK_SELLERS:
        raise SizeLimitError(
            f"exact solver handles at most {MAX_MASK_SELLERS} sellers per side, "
            f"got {n_data} data sellers and {n_uav} UAVs"
        )
    return n_data, n_uav


def solve_exact(matrices: list[JointBidMatrix]) -> Allocation:
    """Optimal allocation for the given joint-bid matrices."""
    _n_data, n_uav = _check_sides(matrices)
    return _solve(_candidates(matrices), n_uav)


def solve_exact_excluding(
    matrices: list[JointBidMatrix], data_seller_id: int, uav_seller_id: int
) -> Allocation:
    """Optimal allocation of the market without one data seller and one UAV.

    Both sellers are removed outright, so no triple may use either of them.
    """
    _n_data, n_uav = _check_sides(matrices)
    return _solve(_candidates(matrices, skip_m=data_seller_id, skip_n=uav_seller_id), n_uav)


def brute_force_oracle(matrices: list[JointBidMatrix]) -> Allocation:
    """Reference solver: plain exhaustive enumeration, no shared machinery.

    Visits every set of disjoint positive-margin triples once. Intended for
    cross-checking ``solve_exact`` on small instances only.
    """
    if not matrices:
        return Allocation(triples=set(), objective=0.0)
    n_buyers = len(matrices)
    n_data = len(matrices[0].entries)
    n_uav = len(matrices[0].entries[0]) if matrices[0].entries else 0
    if n_buyers > MAX_ORACLE_SIZE or n_data > MAX_ORACLE_SIZE or n_uav > MAX_ORACLE_SIZE:
        raise SizeLimitError(
            f"oracle enumerates at most {MAX_ORACLE_SIZE} participants per side, "
            f"got {n_buyers}/{n_data}/{n_uav}"
        )

    cands = _candidates(matrices)
    best_value = 0.0
    best_chosen: tuple[tuple[int, int, int], ...] = ()

    def visit(l: int, used_m: int, used_n: int, acc: float,
              chosen: tuple[tuple[int, int, int], ...]) -> None:
        nonlocal best_value, best_chosen
        if l == n_buyers:
            if acc > best_value or (acc == best_value and chosen < best_chosen):
                best_value = acc
                best_chosen = chosen
            return
        visit(l + 1, used_m, used_n, acc, chosen)
        for (m, n, r) in cands[l]:
            if used_m & (1 << m) == 0 and used_n & (1 << n) == 0:
                visit(l + 1, used_m | (1 << m), used_n | (1 << n),
                      acc + r, chosen + ((l, m, n),))

    visit(0, 0, 0, 0.0, ())
    return Allocation(triples=set(best_chosen), objective=best_value)
