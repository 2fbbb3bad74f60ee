"""
Checking the solver against brute force
=======================================

On tiny instances the LFD program can be searched exhaustively over a
grid of distributions, with exact Wasserstein distances. The grid optimum
can only sit above the LP optimum, by at most M * n * resolution.
"""

from drknn.core import empirical_distributions, euclidean_cost
from drknn.lfd import solve_lfd
from drknn.verify import GridSpec, brute_force_lfd, run_checks, tiny_suite

grid = GridSpec(0.05)
for inst in tiny_suite(seed=0, size=5):
    ds = inst["dataset"]
    cost, P = euclidean_cost(ds), empirical_distributions(ds)
    lp = solve_lfd(cost, P, inst["radii"]).objective
    bf = brute_force_lfd(cost, P, inst["radii"], grid)
    print(f"n={len(ds)} M={ds.class_count} radius={inst['radii'][0]:.2f}  "
          f"LP {lp:.4f}  grid {bf['objective']:.4f}")

# the same checks the `drknn verify` command runs
rows = run_checks(seed=0)
print(sum(r["passed"] for r in rows), "of", len(rows), "checks passed")
