# %% [markdown]
# # The spectral toolbox
#
# Fields live on the 2π-periodic grid x_j = 2πj/N and are stored as their
# Fourier coefficients. Everything in the package is built from a handful of
# diagonal multipliers and one dealiased product.

# %%
import numpy as np

from moderate_waves import (
    derivative,
    from_function,
    lambda_pow,
    make_grid,
    multiply,
    sobolev_norm,
)

grid = make_grid(64)
u = from_function(lambda x: np.cos(4 * x), grid)

# %% [markdown]
# A single cosine has the closed-form norm √π(1+n²)^{σ/2}.

# %%
for sigma in (0, 1, 2):
    exact = np.sqrt(np.pi) * (1 + 16) ** (sigma / 2)
    print(f"H^{sigma}: {sobolev_norm(u, sigma):.15f}  closed form {exact:.15f}")

# %% [markdown]
# Λ^r = (1 - ∂ₓ²)^{r/2} scales mode k by (1+k²)^{r/2}; Λ⁻² undoes Λ².

# %%
v = lambda_pow(lambda_pow(u, 2), -2)
print("round trip error:", np.max(np.abs(v.values - u.values)))
print("d/dx cos 4x at x=0.1:", derivative(u, 1).values[1], -4 * np.sin(4 * grid.points[1]))

# %% [markdown]
# Products are formed on a 3× padded grid, so quartic nonlinearities of
# fields band-limited to N/6 come out free of aliasing.

# %%
a = from_function(lambda x: np.cos(8 * x), make_grid(32))
a4 = multiply(multiply(a, a), multiply(a, a))
print("mean of cos^4(8x):", a4.coefficient(0).real, "expected", 3 / 8)
