# %% [markdown]
# # Close data, diverging solutions
#
# The two families u_{+1,n} and u_{-1,n} start √(2π)/(7n) apart in H^s,
# which tends to zero. After time t their distance stays above roughly
# (√π/7)|sin t|. The solution map is continuous but not uniformly so.

# %%
from moderate_waves import SolverConfig, run_nonuniform_study

rep = run_nonuniform_study(2.0, [16, 32, 64], [0.0, 0.25, 0.5, 0.75, 1.0], SolverConfig(n_modes=512))

print("initial gaps   ", [f"{g:.5f}" for g in rep.initial_gaps])
print("closed form    ", [f"{g:.5f}" for g in rep.closed_form_initial_gaps])
print()
print(" n     t    gap      bound    margin")
for i, n in enumerate(rep.n_list):
    for j, t in enumerate(rep.t_grid):
        g, b = rep.gap_matrix[i][j], rep.lower_bound_matrix[i][j]
        print(f"{n:3d}  {t:4.2f}  {g:.5f}  {b:+.5f}  {g - b:+.5f}")

# %% [markdown]
# The norms never leave the doubling bound, and refining the grid does not
# move the margins.

# %%
print("bounded:", rep.bounded)
print("refinement:", rep.refinement)
