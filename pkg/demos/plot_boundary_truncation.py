"""
Which training points sit on the boundary
=========================================

Six collinear points, three per class, with the inner pair 0.5 apart.
After solving for the LFDs the points near the boundary carry mass from
both classes. Entropy truncation keeps only those.
"""

import numpy as np

from drknn import classifiers as clf
from drknn import datasets
from drknn.core import empirical_distributions, euclidean_cost
from drknn.lfd import solve_lfd

ds = datasets.six_point()
sol = solve_lfd(euclidean_cost(ds), empirical_distributions(ds), 0.2)

print("x     class-1 mass  class-2 mass  entropy")
for i, x in enumerate(ds.features[:, 0]):
    print(f"{x:<5} {sol.lfds[0, i]:<13.4f} {sol.lfds[1, i]:<13.4f} "
          f"{clf.sample_entropy(sol.lfds, i):.4f}")

kept = clf.truncate(sol.lfds, 0.9)
print("kept at tau = 0.9:", ds.features[kept.kept_indices, 0])

# Dr.1-NN over the line, with and without truncation. Both kept points hold
# equal mass for the two classes, so every truncated vote is a tie and goes
# to class 1: the kept points are the ambiguous ones, not the informative ones
grid = np.column_stack([np.linspace(-0.5, 5, 12), np.zeros(12)])
full = clf.classify(clf.drknn_votes(grid, ds, sol.lfds, 1))
trunc = clf.classify(clf.truncated_drknn_votes(grid, ds, sol.lfds, 1, kept))
for x, a, b in zip(grid[:, 0], full, trunc):
    print(f"query {x:5.2f}  Dr.1-NN {a}  truncated {b}")

# a narrow Gaussian kernel behaves like Dr.1-NN away from exact ties
kern = clf.classify(clf.kernel_log_votes(grid, ds, sol.lfds, 1e-3))
print("kernel h=1e-3 agrees with Dr.1-NN on", int(np.sum(kern == full)), "of", len(grid))
