# %% [markdown]
# # Finite-sample compactness evidence
#
# `theorem1_certify` checks a sequence against a pair of weights `nu << psi`:
# boundedness in `G(psi)`, total boundedness in `L^p` at a ladder of probes,
# and a diagonal subsequence that is Cauchy in `G(nu)`.  The verdict is
# evidence from finitely many members, never a proof.

# %%
from glskit import FunctionSequence, gaussian_truncation_family, make_psi_builtin, theorem1_certify, theorem2_certify

psi_half = make_psi_builtin("power_alpha", 0.5)
seq = FunctionSequence.remark2_truncated_gaussian()
good = theorem1_certify(seq, make_psi_builtin("power_alpha", 1.0), psi_half)
print(good.verdict.value, good.condition1["bound"])
print(good.extraction_csv().splitlines()[-3:])

# %% [markdown]
# Swapping the weights so that the outer one grows too slowly breaks the
# uniform bound: the member norms keep increasing.

# %%
bad = theorem1_certify(seq, psi_half, make_psi_builtin("power_alpha", 0.25), n_max=60)
print(bad.verdict.value, bad.condition1["trend"][-5:])

# %% [markdown]
# `theorem2_certify` tests a family for uniform absolute continuity of the
# norm (the EGA modulus).  The Gaussian quantile grid keeps a positive floor
# as the set size shrinks, so the EGA leg fails.

# %%
rep, ega = theorem2_certify(gaussian_truncation_family(2 ** 14), psi_half)
print(rep.verdict.value, rep.ega["floor_estimate"])
print(list(zip(ega.deltas, ega.etas)))
