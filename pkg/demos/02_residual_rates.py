# %% [markdown]
# # How well do the approximate solutions solve the equation?
#
# u^{ω,n}(t, x) = (ω/n - 1 - n^{-s} cos(nx + ωt)) / 14 is not an exact
# solution. Plugging it in leaves a residual E = E1 - E2 whose H¹ norm
# shrinks like a power of n. We compute E from the solver's right-hand side
# and compare it with the two harmonic closed forms.

# %%
from moderate_waves import (
    ApproxParams,
    analytic_E1,
    analytic_E2,
    make_grid,
    residual_E,
    residual_rate_study,
    sobolev_norm,
)

grid = make_grid(512)
p = ApproxParams(omega=1, n=16, s=2.0)
e = residual_E(p, 0.3, grid)
closed = analytic_E1(p, 0.3, grid) - analytic_E2(p, 0.3, grid)
print("relative mismatch:", sobolev_norm(e - closed, 0) / sobolev_norm(closed, 0))

# %% [markdown]
# Fitting log‖E‖ against log n gives the decay rate. For s ≥ 2 the expected
# slope at σ = 1 is -s - 1 + σ; below 2 it is -2s + 1 + σ.

# %%
for s in (2.0, 1.75):
    fit = residual_rate_study(s, 1.0, [8, 16, 32, 64, 128], t=0.3)
    print(f"s = {s}: slope {fit.slope:.3f} (expected {fit.theoretical_slope}), R² = {fit.r_squared:.5f}")
