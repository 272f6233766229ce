# %% [markdown]
# # Two sequences that do not converge in norm
#
# Scaling a fixed function, `f_n = f * n/(n+1)`, converges in every norm at
# rate `1/(n+1)`, which makes it a clean check of the norm scan.  Gaussian
# truncations `xi_n = xi 1{|xi| <= n}` are the interesting case: they
# converge in every `L^p` but stay a fixed distance from `xi` in
# `G(psi_0.5)`, while a stronger weight `nu(p) = p` sees the convergence.

# %%
import math

from glskit import make_psi_builtin, remark_demos

rep = remark_demos("remark1", make_psi_builtin("grand_b", 2.0), n_values=[1, 10, 100, 1000])
for row in rep["rows"]:
    print(row["n"], row["measured"], row["expected"], row["rel_error"])

# %%
rep2 = remark_demos("remark2", n_values=range(0, 21))
print("sup_n ||xi_n|| =", rep2["sup_truncated"], " ||xi|| =", rep2["norm_xi"])
print("smallest gap in G(psi_0.5):", min(rep2["gap_norms"]), " floor e^-1/2 =", math.exp(-0.5))
for row in rep2["lp_convergence"]:
    print(row["p"], row["tail_lp"][:4])

# %% [markdown]
# Under `nu(p) = p` the gaps fall steadily; at `n = 20` they are below a
# tenth of their first value.

# %%
strong = rep2["stronger_norm"]["gap_norms"]
print(rep2["stronger_norm"]["order"], strong[1], strong[-1], strong[-1] / strong[1])
