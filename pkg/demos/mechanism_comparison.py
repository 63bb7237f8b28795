"""Race all six methods over seeded random markets.

Prints mean objective, win rate against the exact optimum, and mean
relative gap per size. Equivalent to `flmarket compare` without files.
"""

from flmarket import FogaConfig
from flmarket.harness import compare


def main():
    sizes = [(3, 3, 3), (4, 4, 4), (5, 5, 5)]
    trials = 40
    print(f"{trials} trials per size, seed 0\n")
    report = compare(sizes, trials=trials, seed=0,
                     foga_config=FogaConfig(population_size=30, generations=60))
    header = f"{'size':8s} {'method':9s} {'mean F':>10s} {'win rate':>9s} {'mean gap':>9s}"
    print(header)
    print("-" * len(header))
    for row in report.rows:
        size = "/".join(str(x) for x in row.size)
        win = "" if row.win_rate_vs_exact is None else f"{row.win_rate_vs_exact:9.2f}"
        gap = "" if row.mean_relative_gap is None else f"{row.mean_relative_gap:9.4f}"
        print(f"{size:8s} {row.method:9s} {row.mean_objective:10.4f} {win:>9s} {gap:>9s}")


if __name__ == "__main__":
    main()
