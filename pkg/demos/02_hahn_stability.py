# %% [markdown]
# # How far can double precision go?
#
# Hahn weights on 0..N-1.  The recurrence matrix becomes badly conditioned as
# N grows, so the question is whether an algorithm loses more than the
# problem itself forces it to.  We compare the forward error of each solver
# with a perturbation estimate of the conditioning.

# %%
import numpy as np

from mopiep import Hahn, MopError, build_system, solve
from mopiep.diagnostics import biorth_loss, conditioning_estimate, forward_error
from mopiep.moments import reference_solve

EPS = 2.0 ** -52
ALGS = ("core", "kryl", "krylreorth_full")

print(f"{'N':>3} {'cond':>9} " + " ".join(f"{a:>16}" for a in ALGS))
for N in range(5, 26, 4):
    s = build_system(Hahn(), N)
    Href = reference_solve(s)
    cond = conditioning_estimate(s, EPS, trials=3)
    row = []
    for alg in ALGS:
        try:
            row.append(forward_error(solve(s, alg, kind="double", breakdown_tol=0.0).H, Href))
        except MopError:
            row.append(np.nan)
    print(f"{N:3d} {cond:9.1e} " + " ".join(f"{e:16.1e}" for e in row))

# %% [markdown]
# Short recurrences lose biorthogonality quickly; reorthogonalization and the
# core transformations keep it near machine precision for a while longer.

# %%
s = build_system(Hahn(), 20)
for alg in ALGS:
    sol = solve(s, alg, kind="double", breakdown_tol=0.0)
    print(f"{alg:16s} {biorth_loss(sol.W, sol.V):.1e}")
