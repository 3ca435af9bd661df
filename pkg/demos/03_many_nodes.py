# %% [markdown]
# # Many nodes
#
# Random weights in [1, 2) on Chebyshev and on equidistant points.  Full
# reorthogonalization copes with hundreds of Chebyshev nodes; on equidistant
# points every method eventually gives up, the plain recurrences first.
# The reference is computed in double-double.

# %%
from mopiep.experiments import run_experiment

for name, ns in (("fig5_chebyshev", [50, 100, 200]), ("fig5_equidistant", [50, 100, 150])):
    rep = run_experiment(name, ns)
    print(name)
    for alg in ("kryl", "krylreorth_partial", "krylreorth_full"):
        col = rep.column(alg, "e_n")
        print(f"  {alg:20s}", "  ".join(f"N={n}: {col[n]:.1e}" for n in ns))

# %% [markdown]
# The same tables come out of the command line as CSV:
#
#     mopiep experiment fig5_scaling --ns 50:200:50 -o scaling.csv
