"""
Least favorable distributions on two points
===========================================

Two classes, one training point each, unit distance apart. Each class is
allowed to move a quarter of its mass, and the adversary moves it towards
the other class.
"""

import numpy as np

from drknn import datasets, lfd
from drknn.core import empirical_distributions, euclidean_cost, risk

ds = datasets.two_point()
cost = euclidean_cost(ds)
P = empirical_distributions(ds)
print("empirical masses\n", P)

# solve with a radius of 0.25 for both classes
sol = lfd.solve_lfd(cost, P, 0.25)
print("least favorable distributions\n", sol.lfds.round(6))
print("objective", round(sol.objective, 6), "minimax risk", round(sol.minimax_risk, 6))

# the robust classifier still labels each point by its own class,
# but its risk under the shifted masses is 0.5
pi = lfd.optimal_classifier(sol)
print("classifier\n", pi)
print("risk under the LFDs", round(risk(pi, sol.lfds), 6))

# the Lipschitz-regularized problem reaches the same value
rep = lfd.duality_report(cost, P, 0.25)
print("duality", rep.as_dict())

# growing the radius pushes the risk to M - 1 = 1
for theta in np.linspace(0, 0.6, 7):
    print(f"radius {theta:.1f}  minimax risk {lfd.solve_lfd(cost, P, theta).minimax_risk:.3f}")
