"""The moderate-amplitude shallow-water equation in local and nonlocal form.

Local form:

    u_t + u_x + 6uu_x - 6u²u_x + 12u³u_x + u_xxx - u_xxt + 14uu_xxx + 28u_xu_xx = 0

Inverting (1 - ∂ₓ²) gives the first-order nonlocal evolution

    u_t = u_x + 14uu_x + ∂ₓΛ⁻²R(u),    R(u) = 7u_x² - 3u⁴ + 2u³ - 10u² - 2u,

which is what the integrator advances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    SpectralField,
    derivative,
    from_padded,
    lambda_pow,
    sobolev_norm,
    to_padded,
    winf_norm,
)


@dataclass(frozen=True)
class RhsBreakdown:
    """u_t split into transport u_x + 14uu_x and nonlocal ∂ₓΛ⁻²R(u)."""

    transport: SpectralField
    nonlocal_: SpectralField

    @property
    def total(self) -> SpectralField:
        return self.transport + self.nonlocal_


def split_mean(u: SpectralField) -> tuple[float, SpectralField]:
    """Return (mean, u - mean)."""
    mean = float(u.coeffs[0].real)
    return mean, u - mean


def r_of_u(u: SpectralField) -> SpectralField:
    """R(u) = 7u_x² - 3u⁴ + 2u³ - 10u² - 2u, evaluated alias free.

    The polynomial part is expanded in powers of the fluctuation w = u - ū
    about the mean ū. The constant and linear pieces are exact in Fourier
    space and only w², w³, w⁴ and u_x² are formed on the padded grid, so
    FFT roundoff scales with the fluctuation rather than with the mean.
    """
    a, w = split_mean(u)
    p0 = a * (-2.0 + a * (-10.0 + a * (2.0 - 3.0 * a)))
    p1 = -2.0 + a * (-20.0 + a * (6.0 - 12.0 * a))
    p2 = -10.0 + a * (6.0 - 18.0 * a)
    p3 = 2.0 - 12.0 * a
    v = to_padded(w)
    vx = to_padded(derivative(u, 1))
    poly = 7.0 * vx * vx + v * v * (p2 + v * (p3 - 3.0 * v))
    return from_padded(poly, u.grid) + p1 * w + p0


def transport_term(u: SpectralField) -> SpectralField:
    """u_x + 14uu_x, with the mean contribution applied spectrally."""
    a, w = split_mean(u)
    ux = derivative(u, 1)
    return (1.0 + 14.0 * a) * ux + from_padded(14.0 * to_padded(w) * to_padded(ux), u.grid)


def rhs_nonlocal(u: SpectralField) -> RhsBreakdown:
    nonlocal_ = derivative(lambda_pow(r_of_u(u), -2.0), 1)
    return RhsBreakdown(transport=transport_term(u), nonlocal_=nonlocal_)


def rhs(u: SpectralField) -> SpectralField:
    return rhs_nonlocal(u).total


def local_terms(u: SpectralField) -> SpectralField:
    """Every term of the local equation except u_t - u_xxt."""
    a, w = split_mean(u)
    ux, uxxx = derivative(u, 1), derivative(u, 3)
    # 1 + 6u - 6u² + 12u³ expanded about the mean
    q0 = 1.0 + a * (6.0 + a * (-6.0 + 12.0 * a))
    q1 = 6.0 + a * (-12.0 + 36.0 * a)
    q2 = -6.0 + 36.0 * a
    v = to_padded(w)
    vx, vxx, vxxx = to_padded(ux), to_padded(derivative(u, 2)), to_padded(uxxx)
    poly = vx * v * (q1 + v * (q2 + 12.0 * v)) + 14.0 * v * vxxx + 28.0 * vx * vxx
    return from_padded(poly, u.grid) + q0 * ux + (1.0 + 14.0 * a) * uxxx


def local_form_residual(u: SpectralField, band_rtol: float = 1e-12) -> float:
    """L² norm of (1 - ∂ₓ²)·rhs_nonlocal(u) + local terms.

    Zero up to roundoff whenever the two forms of the equation agree. ``u``
    must occupy at most N/6 modes so that the quartic products and the two
    extra derivatives are fully resolved.
    """
    limit = u.grid.n_modes // 6
    if u.bandwidth(band_rtol) > limit:
        raise ValueError(
            f"insufficient band limit: field uses modes beyond N/6 = {limit}"
        )
    total = rhs_nonlocal(u).total
    residual = total - derivative(total, 2) + local_terms(u)
    return sobolev_norm(residual, 0.0)


def local_form_tolerance(u: SpectralField, rtol: float = 1e-9) -> float:
    """Scale against which :func:`local_form_residual` is judged."""
    return rtol * (1.0 + winf_norm(u, 1) ** 3) * sobolev_norm(u, 4.0)


def h1_energy(u: SpectralField) -> float:
    return sobolev_norm(u, 1.0)


def max_transport_speed(u: SpectralField) -> float:
    """max |1 + 14u| over the collocation grid."""
    return float(np.max(np.abs(1.0 + 14.0 * u.values)))
