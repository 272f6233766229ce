# %% [markdown]
# # Evaluating G(psi) norms
#
# The norm of `f` in the bilateral grand Lebesgue space is the supremum over
# `p` in `(a, b)` of `|f|_p / psi(p)`.  `gls_norm` scans the ratio on a logit
# grid in `s = log((p - a)/(b - p))`, adds geometric ladders toward both
# endpoints and refines the best interior point by golden section.

# %%
import math

import numpy as np

from glskit import (
    MeasuredPartition,
    gaussian_moment_curve,
    g0_membership,
    gls_norm,
    indicator,
    make_psi_builtin,
    order_relation,
)

psi = make_psi_builtin("power_alpha", 0.5)
res = gls_norm(gaussian_moment_curve(), psi)
print(f"||xi|| = {res.value:.10f} at p = {res.argmax_p}; sqrt(2/pi) = {math.sqrt(2 / math.pi):.10f}")

# %% [markdown]
# The ratio keeps a positive limit as `p` grows, which is why the standard
# normal lies in `G(psi)` but outside the closed subspace `G0`.

# %%
for p in (10.0, 100.0, 1000.0):
    print(p, gaussian_moment_curve().eval(p) / math.sqrt(p))
print("limit e^-1/2 =", math.exp(-0.5))
print(g0_membership(gaussian_moment_curve(), psi).verdict.value)

# %% [markdown]
# Indicators of small sets have a closed-form norm: the supremum of
# `delta^(1/p) / sqrt(p)` sits at `p = 2 ln(1/delta)`.

# %%
for k in (4, 8, 16):
    d = math.exp(-k)
    f = indicator(MeasuredPartition.abstract([d, 1 - d]), [True, False])
    print(k, gls_norm(f, psi).value, math.exp(-0.5) / math.sqrt(2 * k))

# %% [markdown]
# A weight growing too slowly makes the norm diverge, and the result says so
# instead of returning a truncated scan value.

# %%
slow = make_psi_builtin("power_alpha", 0.25)
print(gls_norm(gaussian_moment_curve(), slow).diverged)
print(order_relation(psi, make_psi_builtin("power_alpha", 1.0)).value)
