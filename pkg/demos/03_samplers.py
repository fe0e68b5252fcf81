# %% [markdown]
# # Three ways to pick a subsample
#
# Uniform draws without replacement, IBOSS (the rows holding the extreme
# values of each covariate) and leverage-score sampling with replacement.

# %%
import numpy as np

from subcenter import Dataset, DrawMode, iboss_select, leverage_sample, leverage_scores, uniform_sample
from subcenter.datagen import CaseKind, SimCase, default_model, gen_covariates, gen_response
from subcenter.rng import stream

X = gen_covariates(SimCase(CaseKind.T5, 2), 10_000, stream(1, purpose="demo:X"))
d = Dataset(X, gen_response(X, default_model(2), stream(1, purpose="demo:y")))

# %% [markdown]
# IBOSS is deterministic. For each column it takes the smallest and largest
# values among rows not already chosen.

# %%
ib = iboss_select(d.X, 8)
print(ib.idx)
print(d.X[ib.idx].round(2))

# %% [markdown]
# Uniform draws come from a named random stream, so the same seed and
# purpose always give the same rows.

# %%
u1 = uniform_sample(d.n, 5, DrawMode.DETERMINISTIC, stream(1, 0, purpose="demo:uniform"))
u2 = uniform_sample(d.n, 5, DrawMode.DETERMINISTIC, stream(1, 0, purpose="demo:uniform"))
print(u1.idx, np.array_equal(u1.idx, u2.idx))

# %% [markdown]
# Leverage scores sum to the number of columns of the design (p + 1).
# Sampled rows carry inverse-probability weights for a weighted fit.

# %%
h = leverage_scores(d)
print("sum of leverages:", h.sum())
lev = leverage_sample(d, 5, stream(1, purpose="demo:lev"), scores=h)
print(lev.idx)
print(lev.w_star)
