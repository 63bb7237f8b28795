"""Measure how the two mechanisms scale with market size.

The exact solver's layered DP grows exponentially in min(M, N) while
the greedy matching stays near-linear, so the gap widens fast. Sizes
above the default cap skip the exact method.
"""

from flmarket.harness import bench


def main():
    sizes = [(2, 2, 2), (3, 3, 3), (4, 4, 4), (5, 5, 5), (6, 6, 6), (8, 8, 8)]
    print("10 trials per size (wall clock, so numbers vary between machines)\n")
    rows = bench(sizes, trials=10, seed=0, methods=("vcg", "matching"))
    means = {}
    header = f"{'size':8s} {'method':9s} {'mean':>12s} {'std':>12s}  status"
    print(header)
    print("-" * len(header))
    for row in rows:
        size = "/".join(str(x) for x in row.size)
        if row.trials:
            print(f"{size:8s} {row.method:9s} {row.mean_elapsed:11.6f}s "
                  f"{row.std_elapsed:11.6f}s  {row.status}")
        else:
            print(f"{size:8s} {row.method:9s} {'-':>12s} {'-':>12s}  {row.status}")
        means[(row.size, row.method)] = row.mean_elapsed

    print("\nexact / matching runtime ratio:")
    for size in sizes:
        vcg = means.get((size, "vcg"), 0.0)
        match = means.get((size, "matching"), 0.0)
        if vcg and match:
            print(f"  {size[0]}/{size[1]}/{size[2]}: {vcg / match:8.1f}x")


if __name__ == "__main__":
    main()
