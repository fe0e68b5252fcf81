# %% [markdown]
# # Exact variances and the closed-form gap
#
# Every estimator here is linear in the full response vector, so its
# conditional variance is sigma^2 L L^T for an explicit map L. The difference
# between the intercept and no-intercept slope variances has a rank-one
# closed form.

# %%
import numpy as np

from subcenter import Variant, build_map, exact_variance, prop1_gap

# %% [markdown]
# A four-point toy design, selecting the first three rows.

# %%
X = np.array([[0.0], [0.0], [1.0], [1.0]])
g = prop1_gap(X, [0, 1, 2], sigma2=1.0)
print("d   =", g.d, "(1/9 =", 1 / 9, ")")
print("gap =", g.gap.M[0, 0], "(5/18 =", 5 / 18, ")")

# %% [markdown]
# The same number from the exact maps.

# %%
v_wi = exact_variance(build_map(Variant.SUB_OLS_WI, X, [0, 1, 2], part="beta"), 1.0).M
v_woi = exact_variance(build_map(Variant.SUB_OLS_WOI, X, [0, 1, 2], part="beta"), 1.0).M
print(v_wi - v_woi)

# %% [markdown]
# A larger random design: the gap is positive semidefinite with a single
# nonzero eigenvalue.

# %%
rng = np.random.default_rng(3)
X = rng.normal(size=(300, 4)) * [1, 2, 3, 4] + 5
idx = rng.choice(300, size=40, replace=False)
g = prop1_gap(X, idx, sigma2=1.0)
oracle = (exact_variance(build_map(Variant.SUB_OLS_WI, X, idx, part="beta"), 1.0).M
          - exact_variance(build_map(Variant.SUB_OLS_WOI, X, idx, part="beta"), 1.0).M)
print("relative error :", np.linalg.norm(g.gap.M - oracle) / np.linalg.norm(oracle))
print("eigenvalues    :", np.linalg.eigvalsh(g.gap.M))
