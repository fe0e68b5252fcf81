# %% [markdown]
# # The self-check report
#
# `verify` runs seeded randomized suites: matrix identities, closed-form gap
# vs exact maps, the weighted-relocation ordering and an unbiasedness z-test.
# Each row reports the worst residual next to its threshold.

# %%
from subcenter.verification import verify

for row in verify(seed=1, instances=30, unbiased_reps=500):
    print(f"{row.name:42s} {row.residual:10.2e}  <= {row.threshold:.0e}  {'ok' if row.passed else 'FAIL'}")

# %% [markdown]
# Expect `weighted_relocation_loewner` to fail. The ordering only holds with a
# single slope (the `_single_slope` row) or uniform weights. The CLI form is
#
#     subcenter verify --seed 1 --out residuals.csv
