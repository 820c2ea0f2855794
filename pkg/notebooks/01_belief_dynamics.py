"""
Belief averaging with stubborn control nodes
============================================

Every node repeatedly replaces its belief by the average of its own
private belief and its neighbors' current beliefs. Control nodes ignore
their neighbors and broadcast a fixed belief. This script walks through the
update rule on two tiny graphs and then compares the iterative and exact
solvers on a larger one.
"""

# %%
import numpy as np

from beliefflow import ControlStrategy, Graph, PrivateBeliefDistribution
from beliefflow.engine import (BeliefState, control_power_exact, converge_exact, converge_iterative,
                               step)

# %%
# One step on a triangle: each node averages three numbers.
tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
w = np.array([0.9, -0.3, 0.0])
print("after one step:", step(BeliefState(w, w), tri).b)

# %%
# Running to the fixed point. Both solvers agree; the exact one factorizes
# the linear system once.
b_iter, steps = converge_iterative(tri, w)
print(f"iterative ({steps} steps):", b_iter)
print("exact:", converge_exact(tri, w))

# %%
# A path with its middle node held at +1 pulls both leaves halfway.
path = Graph.from_edges(3, [(0, 1), (1, 2)])
center = ControlStrategy.uniform([1], 1.0)
print("path, center controlled:", converge_exact(path, np.zeros(3), center))

# %%
# Control power is the average shift of converged beliefs away from the
# private ones. With private beliefs at zero it is just the mean belief.
est = control_power_exact(path, PrivateBeliefDistribution.constant(0.0), center)
print("control power:", est.mean)

# %%
# On a random graph with uniform private beliefs the Monte Carlo estimate
# carries a standard error.
rng = np.random.default_rng(0)
n = 150
iu = np.triu_indices(n, 1)
keep = rng.random(len(iu[0])) < 0.04
g = Graph.from_edges(n, np.column_stack([iu[0][keep], iu[1][keep]]))
hubs = np.argsort(-g.degrees, kind="stable")[:8]
ctl = ControlStrategy.uniform(sorted(hubs.tolist()), 1.0)
est = control_power_exact(g, PrivateBeliefDistribution.uniform(), ctl, n_samples=200, seed=1)
print(f"random graph: cp = {est.mean:.4f} +- {est.stderr:.4f}")
