"""
Few-shot episodes on noisy Gaussians
====================================

Two unit Gaussians 2 apart, with a fifth of the labels flipped. Each
episode trains on 5 samples per class and scores 200 held-out queries.
All classifiers see the same episodes, so differences are paired.
"""

import numpy as np

from drknn.evaluation import (DEFAULT_RADIUS_GRID, EpisodeSpec, benchmark_source,
                              run_episodes, sweep)
from drknn.models import DrKNN, InverseDistanceKNN, KernelSmoother, TruncatedDrKNN, VanillaKNN

source = benchmark_source(0)
spec = EpisodeSpec(class_count=2, shots=5, query_count=200, seed=0)
episodes = 10

models = [VanillaKNN(k=5), InverseDistanceKNN(k=5), DrKNN(k=5, radius=0.2),
          DrKNN(k=5, radius_grid=list(DEFAULT_RADIUS_GRID)),
          KernelSmoother(radius=0.2, bandwidth=0.5),
          TruncatedDrKNN(k=5, radius=0.2, tau=0.9)]
for m in models:
    rep = run_episodes(m, source, spec, episodes)
    extra = ""
    if "radius" in rep.extras and m.radius_grid is not None:
        picked = [r[0] for r in rep.extras["radius"]]
        extra = f"  chosen radii {picked}"
    if "kept_fraction" in rep.extras:
        extra = f"  kept {np.mean(rep.extras['kept_fraction']):.2f}"
    print(f"{m.name:<17} {rep.mean:.3f} +- {rep.std:.3f}{extra}")

# how much does the neighbourhood size matter?
for rep in sweep("k", range(1, 9), DrKNN(radius=0.2), source, spec, episodes):
    print("k", rep.extras["swept"]["value"], round(rep.mean, 3))
