"""Wall-clock comparison with the generalized-eigenproblem solution.

The baseline forms the scatter matrices and solves a D x D generalized
symmetric eigenproblem; the fast fit solves one ridge system against
CZ - 1 target vectors. The gap widens as the dimension grows.

    python demos/speedup.py
"""
from fastsda import benchmark_speed

rows = benchmark_speed([100, 300, 600, 1200], [600], c=7, z=2, seed=0, repeats=3)
print(f"{'D':>6} {'N':>5} {'eigen ms':>10} {'fast ms':>9} {'ratio':>7}")
for r in rows:
    print(f"{r.dim:6d} {r.n:5d} {1e3 * r.t_oracle:10.1f} {1e3 * r.t_fast:9.1f} {r.ratio:7.1f}")
