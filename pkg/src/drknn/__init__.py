"""Distributionally robust weighted k-nearest neighbours."""

__version__ = "0.1.0"

from .core import (Dataset, LabeledSample, empirical_distributions, euclidean_cost,
                   minimal_risk, risk)
from .lfd import (LfdSolution, LipschitzSolution, SolverError, duality_report,
                  optimal_classifier, solve_lfd, solve_lipschitz, transport_cost)
from .classifiers import classify, drknn_votes, kernel_votes, truncate, vanilla_knn_votes
from .models import DrKNN, KernelSmoother, TruncatedDrKNN, VanillaKNN

__all__ = [
    "Dataset", "LabeledSample", "empirical_distributions", "euclidean_cost",
    "minimal_risk", "risk", "LfdSolution", "LipschitzSolution", "SolverError",
    "duality_report", "optimal_classifier", "solve_lfd", "solve_lipschitz",
    "transport_cost", "classify", "drknn_votes", "kernel_votes", "truncate",
    "vanilla_knn_votes", "DrKNN", "KernelSmoother", "TruncatedDrKNN", "VanillaKNN",
]
