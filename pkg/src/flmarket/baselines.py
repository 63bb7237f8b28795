"""Baseline allocation heuristics.

Four allocation-only strategies to compare the two priced mechanisms
against. None of them computes payments; they return bare allocations
whose margin sum can be held against the exact optimum.

* highest-valuation greedy: grant combinations by buyer valuation,
* lowest-cost greedy: grant combinations by joint bid, cheapest first,
* random matching: every buyer draws uniformly among its remaining
  feasible pairs,
* genetic search: an elitist GA over per-buyer gene vectors with local
  per-buyer improvement sweeps on the incumbent.

All four skip combinations whose margin (valuation - joint bid) is
negative, so no allocation ever carries a loss-making triple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pairing import JointBidMatrix
from .wdp import Allocation

__all__ = ["FogaConfig", "run_hvpm", "run_lcpm", "run_rsbm", "run_foga"]


def _nonnegative_candidates(
    matrices: list[JointBidMatrix],
) -> list[list[tuple[int, int, float, float, float]]]:
    """Per buyer: (m, n, margin, valuation, joint_bid), margin >= 0 only."""
    out = []
    for mat in matrices:
        row = []
        for m, entries in enumerate(mat.entries):
            for n, e in enumerate(entries):
                # non-positive joint quotes are not admitted to the market
                if not e.feasible or e.joint_bid <= 0.0:
                    continue
                margin = e.valuation - e.joint_bid
                if margin >= 0.0:
                    row.append((m, n, margin, e.valuation, e.joint_bid))
        out.append(row)
    return out


def _greedy_by(matrices: list[JointBidMatrix], key) -> Allocation:
    flat = []
    for l, row in enumerate(_nonnegative_candidates(matrices)):
        for (m, n, margin, v, j) in row:
            flat.append((l, m, n, margin, v, j))
    flat.sort(key=key)
    used_l: set[int] = set()
    used_m: set[int] = set()
    used_n: set[int] = set()
    triples: set[tuple[int, int, int]] = set()
    objective = 0.0
    for (l, m, n, margin, _v, _j) in flat:
        if l in used_l or m in used_m or n in used_n:
            continue
        used_l.add(l)
        used_m.add(m)
        used_n.add(n)
        triples.add((l, m, n))
        objective += margin
    return Allocation(triples=triples, objective=objective)


def run_hvpm(matrices: list[JointBidMatrix]) -> Allocation:
    """Highest valuation first; ties fall to the smallest index triple."""
    return _greedy_by(matrices, key=lambda t: (-t[4], t[0], t[1], t[2]))


def run_lcpm(matrices: list[JointBidMatrix]) -> Allocation:
    """Cheapest joint bid first; ties fall to the smallest index triple."""
    return _greedy_by(matrices, key=lambda t: (t[5], t[0], t[1], t[2]))


def run_rsbm(matrices: list[JointBidMatrix], seed: int) -> Allocation:
    """Each buyer, in index order, draws uniformly among its still-free
    feasible pairs; buyers with nothing left go unmatched."""
    rng = np.random.Generator(np.random.PCG64(seed))
    used_m: set[int] = set()
    used_n: set[int] = set()
    triples: set[tuple[int, int, int]] = set()
    objective = 0.0
    for l, row in enumerate(_nonnegative_candidates(matrices)):
        avail = [(m, n, margin) for (m, n, margin, _v, _j) in row
                 if m not in used_m and n not in used_n]
        if not avail:
            continue
        m, n, margin = avail[int(rng.integers(len(avail)))]
        used_m.add(m)
        used_n.add(n)
        triples.add((l, m, n))
        objective += margin
    return Allocation(triples=triples, objective=objective)


@dataclass
class FogaConfig:
    population_size: int = 50
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    fragment_passes: int = 2
    seed: int = 0

    def validate(self) -> None:
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError(f"crossover_rate must lie in [0, 1], got {self.crossover_rate}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must lie in [0, 1], got {self.mutation_rate}")
        if self.fragment_passes < 0:
            raise ValueError(f"fragment_passes must be >= 0, got {self.fragment_passes}")


def _repair(genome: list[int], cands) -> tuple[float, list[int]]:
    """Drop the lower-margin gene of every seller conflict; returns fitness
    and the conflict-free genome."""
    picked = []
    for l, g in enumerate(genome):
        if g >= 0:
            m, n, margin, _v, _j = cands[l][g]
            picked.append((-margin, l, m, n, g))
    picked.sort()
    used_m: set[int] = set()
    used_n: set[int] = set()
    repaired = [-1] * len(genome)
    fitness = 0.0
    for (neg_margin, l, m, n, g) in picked:
        if m in used_m or n in used_n:
            continue
        used_m.add(m)
        used_n.add(n)
        repaired[l] = g
        fitness += -neg_margin
    return fitness, repaired


def _fragment_sweeps(genome: list[int], cands, passes: int) -> tuple[float, list[int]]:
    """Local improvement: re-pick each buyer's gene optimally, others fixed."""
    genome = list(genome)
    for _ in range(passes):
        for l in range(len(genome)):
            used_m = set()
            used_n = set()
            for l2, g in enumerate(genome):
                if l2 != l and g >= 0:
                    m, n, _margin, _v, _j = cands[l2][g]
                    used_m.add(m)
                    used_n.add(n)
            best_g = -1
            best_margin = 0.0
            for g, (m, n, margin, _v, _j) in enumerate(cands[l]):
                if m not in used_m and n not in used_n and margin > best_margin:
                    best_margin = margin
                    best_g = g
            if best_g >= 0:
                genome[l] = best_g
    return _repair(genome, cands)


def run_foga(matrices: list[JointBidMatrix], config: FogaConfig) -> Allocation:
    """Elitist genetic search over one gene per buyer.

    A gene indexes one of the buyer's feasible pairs or opts out (-1);
    conflicting genomes are repaired by keeping the higher-margin gene.
    Each generation the incumbent gets ``fragment_passes`` sweeps of
    per-buyer local improvement and is carried over unchanged.
    """
    config.validate()
    cands = _nonnegative_candidates(matrices)
    n_buyers = len(cands)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    highs = np.array([len(row) for row in cands], dtype=np.int64)
    pop_size = config.population_size

    population: list[list[int]] = []
    fitnesses: list[float] = []
    init = rng.integers(-1, highs, size=(pop_size, n_buyers), endpoint=False) \
        if n_buyers else np.empty((pop_size, 0), dtype=np.int64)
    for i in range(pop_size):
        fit, genome = _repair([int(g) for g in init[i]], cands)
        population.append(genome)
        fitnesses.append(fit)

    best_fit = max(fitnesses)
    best_genome = list(population[fitnesses.index(best_fit)])

    for _ in range(config.generations):
        fit, improved = _fragment_sweeps(best_genome, cands, config.fragment_passes)
        if fit >= best_fit:
            best_fit, best_genome = fit, improved

        n_children = pop_size - 1
        tours = rng.integers(0, pop_size, size=(n_children, 2, 3))
        do_cross = rng.random(n_children)
        cross_mask = rng.random((n_children, n_buyers)) < 0.5
        mut_mask = rng.random((n_children, n_buyers)) < config.mutation_rate
        mut_vals = rng.integers(-1, highs, size=(n_children, n_buyers), endpoint=False) \
            if n_buyers else np.empty((n_children, 0), dtype=np.int64)

        next_pop = [list(best_genome)]
        next_fit = [best_fit]
        for c in range(n_children):
            pa = max(tours[c, 0], key=lambda i: fitnesses[int(i)])
            pb = max(tours[c, 1], key=lambda i: fitnesses[int(i)])
            ga, gb = population[int(pa)], population[int(pb)]
            if do_cross[c] < config.crossover_rate:
                child = [ga[l] if cross_mask[c, l] else gb[l] for l in range(n_buyers)]
            else:
                child = list(ga)
            for l in range(n_buyers):
                if mut_mask[c, l]:
                    child[l] = int(mut_vals[c, l])
            fit, child = _repair(child, cands)
            next_pop.append(child)
            next_fit.append(fit)
            if fit > best_fit:
                best_fit, best_genome = fit, list(child)
        population, fitnesses = next_pop, next_fit

    fit, final = _fragment_sweeps(best_genome, cands, config.fragment_passes)
    if fit >= best_fit:
        best_fit, best_genome = fit, final

    triples = set()
    objective = 0.0
    for l, g in enumerate(best_genome):
        if g >= 0:
            m, n, margin, _v, _j = cands[l][g]
            triples.add((l, m, n))
            objective += margin
    return Allocation(triples=triples, objective=objective)
