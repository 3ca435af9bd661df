# %% [markdown]
# # Three nodes, by hand and by machine
#
# Two discrete measures on the points 0, 1, 2.  The first has unit weights,
# the second puts weight 2 on the origin.  Every solver should hand back the
# same banded Hessenberg recurrence matrix, and in exact arithmetic they do.

# %%
import numpy as np

from mopiep import DiscreteSystem, solve, starting_vectors
from mopiep.diagnostics import eval_typeII, recover_nodes, recover_weights

system = DiscreteSystem.from_values([0, 1, 2], [1, 1, 1], [2, 1, 1], "rational")
start = starting_vectors(system)
print("d1, d2, d3 =", start.d1, start.d2, start.d3)

# %% [markdown]
# Short recurrences, the core transformations and the moment-matrix oracle.

# %%
for alg in ("kryl", "core", "oracle"):
    H = solve(system, alg).H
    print(f"{alg:7s}", [str(v) for v in H.diag], [str(v) for v in H.super1], [str(v) for v in H.super2])

# %% [markdown]
# The bases are biorthogonal and the columns of V are type II polynomials
# evaluated at the nodes.  Their characteristic polynomial vanishes there.

# %%
sol = solve(system, "kryl")
print(sol.W.T @ sol.V)
P, _ = eval_typeII(sol.H, system.nodes)
print("P_3 at the nodes:", list(P[3]))

# %% [markdown]
# Going back: Newton on P_3 from rough guesses, then the weights.

# %%
Hd = sol.H.astype("double")
nodes = recover_nodes(Hd, np.array([0.2, 0.9, 1.8]))
a1, a2 = recover_weights(Hd, nodes, start.d1, start.d2, start.d3)
print("nodes  ", nodes.to_float())
print("weights", a1.to_float(), a2.to_float())
assert np.allclose(a2.to_float(), [2, 1, 1])
