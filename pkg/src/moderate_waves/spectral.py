"""Fourier toolbox on the 2π-periodic circle.

A real periodic function is stored through its complex Fourier coefficients

    u(x) = Σ_k c_k exp(ikx),    c_k = (1/N) Σ_j u(x_j) exp(-ik x_j),

on N equispaced collocation points, with retained wavenumbers
k = -N/2+1, ..., N/2. Coefficients are kept in numpy FFT order.

Sobolev norms follow the orthonormal basis exp(inx)/√(2π), so that

    ‖u‖²_{H^σ} = 2π Σ_k (1+k²)^σ |c_k|²,

which gives ‖1‖_{H^σ} = √(2π) and ‖cos(nx-α)‖_{H^σ} = √π (1+n²)^{σ/2}.

Nonlinear products are evaluated on a grid padded by a factor of three and
truncated back to N modes. For inputs occupying at most N/2 modes every
product of degree four or less is alias free.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

PERIOD = 2.0 * np.pi
PAD_FACTOR = 3


@dataclass(frozen=True)
class SpectralGrid:
    """Equispaced collocation grid on [0, 2π) with an even number of points."""

    n_modes: int

    def __post_init__(self):
        if int(self.n_modes) != self.n_modes:
            raise ValueError("n_modes must be an integer")
        if self.n_modes % 2:
            raise ValueError("n_modes must be even")
        if self.n_modes < 4:
            raise ValueError("n_modes must be at least 4")

    @property
    def period(self) -> float:
        return PERIOD

    @property
    def k_max(self) -> int:
        return self.n_modes // 2

    @cached_property
    def points(self) -> np.ndarray:
        pts = PERIOD * np.arange(self.n_modes) / self.n_modes
        pts.setflags(write=False)
        return pts

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order; the Nyquist entry is +N/2."""
        k = np.fft.fftfreq(self.n_modes, d=1.0 / self.n_modes)
        k[self.k_max] = self.k_max
        k = k.astype(np.int64)
        k.setflags(write=False)
        return k

    def index(self, k: int) -> int:
        """Array position of wavenumber ``k``."""
        if not -self.k_max < k <= self.k_max:
            raise ValueError(f"wavenumber {k} not retained on a grid of {self.n_modes} points")
        return int(k) % self.n_modes


def make_grid(n_modes: int) -> SpectralGrid:
    return SpectralGrid(n_modes)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Real periodic function held as Fourier coefficients on ``grid``."""

    grid: SpectralGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.n_modes,):
            raise ValueError(
                f"expected {self.grid.n_modes} coefficients, got shape {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0] += other
        return SpectralField(self.grid, c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            return multiply(self, scalar)
        return SpectralField(self.grid, scalar * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SpectralField(self.grid, self.coeffs / scalar)

    # -- views --------------------------------------------------------------

    @property
    def values(self) -> np.ndarray:
        return from_spectral(self)

    def coefficient(self, k: int) -> complex:
        return complex(self.coeffs[self.grid.index(k)])

    def bandwidth(self, rtol: float = 1e-13) -> int:
        """Largest |k| whose coefficient exceeds ``rtol`` times the largest one."""
        mag = np.abs(self.coeffs)
        top = mag.max()
        if top == 0.0:
            return 0
        active = np.abs(self.grid.wavenumbers)[mag > rtol * top]
        return int(active.max())

    def __repr__(self):
        return f"SpectralField(n_modes={self.grid.n_modes}, bandwidth={self.bandwidth()})"


# -- construction -------------------------------------------------------------


def to_spectral(values, grid: SpectralGrid) -> SpectralField:
    """Forward transform of real samples ``values`` taken at ``grid.points``."""
    v = np.asarray(values, dtype=np.float64)
    if v.shape != (grid.n_modes,):
        raise ValueError(f"expected {grid.n_modes} samples, got shape {v.shape}")
    return SpectralField(grid, np.fft.fft(v) / grid.n_modes)


def from_spectral(field: SpectralField) -> np.ndarray:
    """Samples of ``field`` at its collocation points."""
    return np.fft.ifft(field.coeffs).real * field.grid.n_modes


def from_function(func: Callable[[np.ndarray], np.ndarray], grid: SpectralGrid) -> SpectralField:
    return to_spectral(func(grid.points), grid)


def from_modes(modes: Mapping[int, complex], grid: SpectralGrid) -> SpectralField:
    """Field with prescribed coefficients for k >= 0; negative k filled by symmetry."""
    c = np.zeros(grid.n_modes, dtype=np.complex128)
    for k, value in modes.items():
        if k < 0:
            raise ValueError("give non-negative wavenumbers only")
        if k == 0 or k == grid.k_max:
            c[grid.index(k)] = complex(value).real
        else:
            c[grid.index(k)] = value
            c[grid.index(-k)] = np.conj(value)
    return SpectralField(grid, c)


def constant(value: float, grid: SpectralGrid) -> SpectralField:
    return from_modes({0: value}, grid)


def zeros(grid: SpectralGrid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n_modes, dtype=np.complex128))


# -- linear operators ------------------------------------------------------------


def derivative(field: SpectralField, order: int = 1) -> SpectralField:
    """∂ₓ^order; the Nyquist mode is dropped for odd orders."""
    if not 0 <= order <= 4 or int(order) != order:
        raise ValueError("order must be an integer in [0, 4]")
    grid = field.grid
    symbol = (1j * grid.wavenumbers) ** order
    if order % 2:
        symbol[grid.k_max] = 0.0
    return SpectralField(grid, symbol * field.coeffs)


def lambda_pow(field: SpectralField, r: float) -> SpectralField:
    """Bessel potential Λ^r = (1 - ∂ₓ²)^{r/2}, symbol (1+k²)^{r/2}."""
    k = field.grid.wavenumbers.astype(np.float64)
    return SpectralField(field.grid, (1.0 + k * k) ** (0.5 * r) * field.coeffs)


def translate(field: SpectralField, shift: float) -> SpectralField:
    """x ↦ u(x - shift). The Nyquist mode is treated as a cosine."""
    grid = field.grid
    phase = np.exp(-1j * grid.wavenumbers * shift)
    phase[grid.k_max] = np.cos(grid.k_max * shift)
    return SpectralField(grid, phase * field.coeffs)


# -- norms ------------------------------------------------------------------------


def sobolev_norm(field: SpectralField, sigma: float) -> float:
    k = field.grid.wavenumbers.astype(np.float64)
    weight = (1.0 + k * k) ** sigma
    return float(np.sqrt(PERIOD * np.sum(weight * np.abs(field.coeffs) ** 2)))


def l2_inner(a: SpectralField, b: SpectralField) -> float:
    a._check(b)
    return float(PERIOD * np.real(np.vdot(b.coeffs, a.coeffs)))


def winf_norm(field: SpectralField, m: int = 0) -> float:
    """Collocation-grid maximum of |∂ₓ^j u| over j = 0..m (m <= 2)."""
    if not 0 <= m <= 2:
        raise ValueError("m must be 0, 1 or 2")
    return max(float(np.max(np.abs(derivative(field, j).values))) for j in range(m + 1))


# -- dealiased products --------------------------------------------------------------


def padded_size(grid: SpectralGrid) -> int:
    return PAD_FACTOR * grid.n_modes


def to_padded(field: SpectralField) -> np.ndarray:
    """Samples of ``field`` on the padded grid of 3N points."""
    grid = field.grid
    half = field.coeffs[: grid.k_max + 1].copy()
    # Nyquist coefficient becomes a cosine split between ±N/2 on the padded grid
    half[grid.k_max] *= 0.5
    m = padded_size(grid)
    return np.fft.irfft(half, n=m) * m


def from_padded(values: np.ndarray, grid: SpectralGrid) -> SpectralField:
    """Transform padded-grid samples and truncate to the modes of ``grid``."""
    m = padded_size(grid)
    if values.shape != (m,):
        raise ValueError(f"expected {m} padded samples, got shape {values.shape}")
    spectrum = np.fft.rfft(values) / m
    n, kmax = grid.n_modes, grid.k_max
    c = np.empty(n, dtype=np.complex128)
    c[:kmax] = spectrum[:kmax]
    c[kmax] = 2.0 * spectrum[kmax].real
    c[kmax + 1 :] = np.conj(spectrum[1:kmax][::-1])
    return SpectralField(grid, c)


def multiply(a: SpectralField, b: SpectralField) -> SpectralField:
    a._check(b)
    return from_padded(to_padded(a) * to_padded(b), a.grid)
