"""Self-audit property suites.

Each suite returns a :class:`CheckResult`. The suites are deterministic
given the seed and compare against fixed tolerances.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import model
from .approx import ApproxParams, analytic_E1, analytic_E2, residual_E
from .experiments import check_interpolation, random_trig_polynomial
from .spectral import (
    from_function,
    from_modes,
    from_spectral,
    l2_inner,
    lambda_pow,
    make_grid,
    sobolev_norm,
    to_spectral,
    winf_norm,
)

NORM_SIGMAS = (0.0, 1.0, 1.5, 2.0, 3.5)
E_MATRIX_N = tuple(range(4, 65, 4))
E_MATRIX_S = (1.6, 2.0, 2.5)
E_MATRIX_T = (0.0, 0.3, 1.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def check_norm_identity(n_max: int = 40) -> CheckResult:
    """‖cos(nx - α)‖_{H^σ} = √π(1+n²)^{σ/2}."""
    grid = make_grid(128)
    worst = 0.0
    for n in range(1, n_max + 1):
        for alpha in (0.0, 0.7):
            u = from_function(lambda x: np.cos(n * x - alpha), grid)
            for sigma in NORM_SIGMAS:
                exact = math.sqrt(math.pi) * (1.0 + n * n) ** (sigma / 2.0)
                worst = max(worst, abs(sobolev_norm(u, sigma) - exact) / exact)
    return CheckResult("norm_identity", worst <= 1e-12, worst, 1e-12)


def check_operators(seed: int = 0) -> CheckResult:
    """Single-mode symbol of Λ^r, Λ^r∘Λ^{-r} = id, Parseval and round trip."""
    rng = np.random.default_rng(seed)
    grid = make_grid(64)
    worst = 0.0
    for k in range(grid.k_max):
        for r in (-2.0, -0.5, 1.0, 3.0):
            symbol = (1.0 + k * k) ** (r / 2.0)
            scaled = lambda_pow(from_modes({k: 1.0}, grid), r).coefficient(k)
            worst = max(worst, abs(scaled - symbol) / symbol)
    roundtrip_ok = True
    for _ in range(20):
        vals = rng.normal(size=grid.n_modes)
        u = to_spectral(vals, grid)
        err = np.max(np.abs(from_spectral(u) - vals))
        roundtrip_ok &= bool(err <= 10.0 * np.finfo(float).eps * np.max(np.abs(vals)))
        r = float(rng.uniform(-3, 3))
        worst = max(worst, sobolev_norm(lambda_pow(lambda_pow(u, r), -r) - u, 0.0) / sobolev_norm(u, 0.0))
        worst = max(worst, abs(sobolev_norm(u, 0.0) ** 2 - l2_inner(u, u)) / l2_inner(u, u))
    return CheckResult(
        "operators", roundtrip_ok and worst <= 1e-12, worst, 1e-12,
        detail="" if roundtrip_ok else "round trip exceeded 10 eps",
    )


def random_band_limited(grid, rng, band: int, w1_max: float = 1.0):
    """Random real field on modes |k| <= band scaled to ‖u‖_{W¹∞} = w1_max·U(0.1, 1)."""
    k = np.arange(band + 1)
    decay = (1.0 + k) ** -rng.uniform(1.0, 3.0)
    coeffs = (rng.normal(size=band + 1) + 1j * rng.normal(size=band + 1)) * decay
    u = from_modes(dict(zip(k.tolist(), coeffs)), grid)
    return u * (w1_max * rng.uniform(0.1, 1.0) / winf_norm(u, 1))


def check_consistency(seed: int = 0, n_samples: int = 100, n_modes: int = 256) -> CheckResult:
    """(1 - ∂ₓ²)·(nonlocal right-hand side) reproduces the local equation."""
    rng = np.random.default_rng(seed)
    grid = make_grid(n_modes)
    worst = 0.0
    for _ in range(n_samples):
        u = random_band_limited(grid, rng, n_modes // 6)
        worst = max(worst, model.local_form_residual(u) / model.local_form_tolerance(u, 1.0))
    return CheckResult("local_nonlocal_consistency", worst <= 1e-9, worst, 1e-9)


def check_residual_decomposition(n_modes: int = 512) -> CheckResult:
    """E from the solver right-hand side equals analytic E1 - E2."""
    grid = make_grid(n_modes)
    worst = 0.0
    for omega in (1, -1):
        for n in E_MATRIX_N:
            for s in E_MATRIX_S:
                for t in E_MATRIX_T:
                    p = ApproxParams(omega, n, s)
                    e1 = analytic_E1(p, t, grid)
                    diff = residual_E(p, t, grid) - (e1 - analytic_E2(p, t, grid))
                    worst = max(worst, sobolev_norm(diff, 0.0) / sobolev_norm(e1, 0.0))
    return CheckResult("residual_decomposition", worst <= 1e-11, worst, 1e-11)


def check_interpolation_suite(seed: int = 0, n_samples: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    grid = make_grid(64)
    worst = 0.0
    failures = 0
    for _ in range(n_samples):
        ok, ratio = check_interpolation(random_trig_polynomial(grid, rng), 1.0, 2.0, 4.0)
        failures += not ok
        worst = max(worst, ratio)
    single = max(
        abs(check_interpolation(from_function(lambda x: np.cos(n * x), grid), 1.0, 2.0, 4.0)[1] - 1.0)
        for n in range(1, 20)
    )
    passed = failures == 0 and single <= 1e-12
    return CheckResult(
        "interpolation", passed, worst, 1e-12,
        detail=f"{failures} failures; single-mode ratio deviation {single:.2e}",
    )


SUITES = (
    ("norm_identity", lambda seed: check_norm_identity()),
    ("operators", check_operators),
    ("local_nonlocal_consistency", check_consistency),
    ("residual_decomposition", lambda seed: check_residual_decomposition()),
    ("interpolation", check_interpolation_suite),
)


def run_all(seed: int = 0) -> list[CheckResult]:
    return [suite(seed) for _, suite in SUITES]
