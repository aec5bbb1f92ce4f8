"""Pseudo-spectral laboratory for a moderate-amplitude shallow-water equation.

Periodic Fourier tools, the nonlocal evolution law, the explicit approximate
solution family and its residual, RK4 time stepping, and studies of
error-decay rates and non-uniform dependence on initial data.
"""

from .approx import (
    ApproxParams,
    analytic_E1,
    analytic_E2,
    approx_solution,
    approx_time_derivative,
    rate_bound,
    residual_E,
)
from .experiments import (
    NonuniformReport,
    RateFit,
    check_interpolation,
    fit_rate,
    gap_lower_bound,
    initial_gap,
    residual_rate_study,
    run_error_decay_study,
    run_hk_growth_study,
    run_nonuniform_study,
)
from .integrator import (
    SolverConfig,
    Trajectory,
    cfl_dt,
    measure_convergence_order,
    simulate,
    step_rk4,
    t0_lower_bound,
)
from .model import RhsBreakdown, h1_energy, local_form_residual, r_of_u, rhs_nonlocal
from .spectral import (
    SpectralField,
    SpectralGrid,
    constant,
    derivative,
    from_function,
    from_modes,
    from_spectral,
    l2_inner,
    lambda_pow,
    make_grid,
    multiply,
    sobolev_norm,
    to_spectral,
    winf_norm,
    zeros,
)

__version__ = "0.1.0"
