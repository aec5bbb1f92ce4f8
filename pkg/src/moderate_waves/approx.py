"""Explicit approximate solutions and their residual.

The family

    u^{ω,n}(t, x) = (ω/n - 1 - n^{-s} cos(nx + ωt)) / 14,   ω = ±1, n >= 1,

has a constant part and one oscillating harmonic. Inserted into the nonlocal
equation it leaves a residual E = E1 - E2 where

    E1 = u_t - u_x - 14uu_x = n^{1-2s}/28 · sin(2(nx + ωt)),
    E2 = Λ⁻²∂ₓR(u).

E2 is also available through exact convolution of harmonic coefficients
(:func:`analytic_E2`), independently of any FFT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import rhs
from .spectral import SpectralField, SpectralGrid, from_modes, sobolev_norm


@dataclass(frozen=True)
class ApproxParams:
    omega: int
    n: int
    s: float

    def __post_init__(self):
        if self.omega not in (-1, 1):
            raise ValueError("omega must be -1 or +1")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.s > 1.5:
            raise ValueError("s must exceed 3/2")

    def check_resolution(self, grid: SpectralGrid, harmonics: int = 8):
        if harmonics * self.n > grid.n_modes:
            raise ValueError(
                f"resolution: n = {self.n} needs n <= N/{harmonics} "
                f"(N = {grid.n_modes})"
            )

    @property
    def mean(self) -> float:
        return (self.omega / self.n - 1.0) / 14.0

    @property
    def amplitude(self) -> float:
        """Amplitude n^{-s}/14 of the oscillating harmonic."""
        return self.n ** (-self.s) / 14.0


def approx_solution(p: ApproxParams, t: float, grid: SpectralGrid) -> SpectralField:
    p.check_resolution(grid)
    c_n = -0.5 * p.amplitude * np.exp(1j * p.omega * t)
    return from_modes({0: p.mean, p.n: c_n}, grid)


def approx_time_derivative(p: ApproxParams, t: float, grid: SpectralGrid) -> SpectralField:
    """∂ₜu^{ω,n} = ω n^{-s}/14 · sin(nx + ωt)."""
    p.check_resolution(grid)
    c_n = p.omega * p.amplitude * np.exp(1j * p.omega * t) / 2j
    return from_modes({p.n: c_n}, grid)


def residual_E(p: ApproxParams, t: float, grid: SpectralGrid) -> SpectralField:
    return approx_time_derivative(p, t, grid) - rhs(approx_solution(p, t, grid))


def analytic_E1(p: ApproxParams, t: float, grid: SpectralGrid) -> SpectralField:
    if 2 * p.n > grid.k_max:
        raise ValueError("mode 2n not resolved on this grid")
    amp = p.n ** (1.0 - 2.0 * p.s) / 28.0
    return from_modes({2 * p.n: amp * np.exp(2j * p.omega * t) / 2j}, grid)


def _harmonics(p: ApproxParams, t: float) -> np.ndarray:
    """Coefficients of u^{ω,n} on harmonics m = -1, 0, 1 of exp(imnx)."""
    c = -0.5 * p.amplitude * np.exp(1j * p.omega * t)
    return np.array([np.conj(c), p.mean, c])


def _conv(*factors: np.ndarray) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.convolve(out, f)
    return out


def _pad_to(h: np.ndarray, half_width: int) -> np.ndarray:
    """Centre a symmetric harmonic vector in one of length 2*half_width + 1."""
    extra = half_width - (len(h) - 1) // 2
    return np.pad(h, extra)


def e2_harmonics(p: ApproxParams, t: float) -> dict[int, complex]:
    """Harmonic coefficients of E2 = Λ⁻²∂ₓR(u^{ω,n}), keyed by wavenumber.

    Computed by discrete convolution of the three-term harmonic vector;
    the result lives on harmonics m·n with |m| <= 4.
    """
    u = _harmonics(p, t)
    m = np.arange(-1, 2)
    ux = 1j * p.n * m * u
    uxx = -((p.n * m) ** 2) * u
    terms = [
        14.0 * _conv(ux, uxx),
        -12.0 * _conv(u, u, u, ux),
        6.0 * _conv(u, u, ux),
        -20.0 * _conv(u, ux),
        -2.0 * ux,
    ]
    total = sum(_pad_to(term, 4) for term in terms)
    k = p.n * np.arange(-4, 5)
    total = total / (1.0 + k.astype(float) ** 2)
    return {int(kk): complex(v) for kk, v in zip(k, total)}


def analytic_E2(p: ApproxParams, t: float, grid: SpectralGrid) -> SpectralField:
    if 4 * p.n > grid.k_max:
        raise ValueError("harmonic 4n not resolved on this grid")
    harm = e2_harmonics(p, t)
    return from_modes({k: v for k, v in harm.items() if k >= 0}, grid)


def rate_exponent(s: float, sigma: float) -> float:
    """Exponent of n in the residual bound ‖E‖_{H^σ} <= C n^{(...)}."""
    if not 0.5 < sigma <= 1.0:
        raise ValueError("sigma must lie in (1/2, 1]")
    if not s > 1.5:
        raise ValueError("s must exceed 3/2")
    if s < 2.0:
        return -2.0 * s + 1.0 + sigma
    return -s - 1.0 + sigma


def rate_bound(s: float, sigma: float, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(n) ** rate_exponent(s, sigma)


def approx_norm_constant(p: ApproxParams, sigma: float, grid: SpectralGrid, t: float = 0.0) -> float:
    """Smallest C with ‖u^{ω,n}(t)‖_{H^σ} <= C(1 + n^{σ-s}) for this member."""
    norm = sobolev_norm(approx_solution(p, t, grid), sigma)
    return norm / (1.0 + p.n ** (sigma - p.s))
