import math

import numpy as np
import pytest

from moderate_waves.approx import (
    ApproxParams,
    analytic_E1,
    analytic_E2,
    approx_norm_constant,
    approx_solution,
    approx_time_derivative,
    e2_harmonics,
    rate_bound,
    rate_exponent,
    residual_E,
)
from moderate_waves.checks import E_MATRIX_N, E_MATRIX_S, E_MATRIX_T
from moderate_waves.experiments import fit_rate
from moderate_waves.spectral import make_grid, sobolev_norm


class TestParams:
    @pytest.mark.parametrize("kw", [dict(omega=0, n=1, s=2), dict(omega=1, n=0, s=2), dict(omega=1, n=1, s=1.5)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ApproxParams(**kw)

    def test_resolution(self):
        with pytest.raises(ValueError, match="resolution"):
            approx_solution(ApproxParams(1, 5, 2), 0.0, make_grid(32))


class TestApproxSolution:
    g = make_grid(64)

    def test_n1(self):
        u = approx_solution(ApproxParams(1, 1, 2), 0.0, self.g)
        assert np.allclose(u.values, -np.cos(self.g.points) / 14, atol=1e-16)

    def test_phase(self):
        u = approx_solution(ApproxParams(-1, 4, 2), math.pi / 2, self.g)
        expected = -(1 / 16) * np.exp(-1j * math.pi / 2) / 28
        assert u.coefficient(4) == pytest.approx(expected)
        assert u.coefficient(-4) == pytest.approx(np.conj(expected))

    def test_matches_formula(self):
        p = ApproxParams(-1, 3, 2.5)
        x = self.g.points
        u = approx_solution(p, 0.7, self.g)
        expected = (-1 / 3 - 1 - 3**-2.5 * np.cos(3 * x - 0.7)) / 14
        assert np.allclose(u.values, expected, atol=1e-16)

    @pytest.mark.parametrize("sigma", [0.5, 1, 2, 4])
    @pytest.mark.parametrize("n", [1, 2, 8])
    @pytest.mark.parametrize("omega", [1, -1])
    def test_norm_bound_constant_one(self, sigma, n, omega):
        p = ApproxParams(omega, n, 2.0)
        assert approx_norm_constant(p, sigma, self.g, t=0.4) <= 1.0
        const_part = math.sqrt(2 * math.pi) / 14 * (1 + 1 / n)
        osc_part = math.sqrt(math.pi) * n**-2.0 * (1 + n * n) ** (sigma / 2) / 14
        norm = sobolev_norm(approx_solution(p, 0.4, self.g), sigma)
        assert norm <= const_part + osc_part

    def test_resolution_independent(self):
        p = ApproxParams(1, 5, 2)
        for sigma in (0, 1, 2.5):
            a = sobolev_norm(approx_solution(p, 0.3, make_grid(64)), sigma)
            b = sobolev_norm(approx_solution(p, 0.3, make_grid(128)), sigma)
            assert a == pytest.approx(b, rel=1e-13)


class TestTimeDerivative:
    g = make_grid(32)

    def test_n1(self):
        du = approx_time_derivative(ApproxParams(1, 1, 2), 0.0, self.g)
        assert np.allclose(du.values, np.sin(self.g.points) / 14, atol=1e-16)

    @pytest.mark.parametrize("omega,n,s,t", [(-1, 2, 2, 0.0), (1, 3, 1.7, 0.4), (-1, 1, 2.5, 1.1)])
    def test_against_finite_difference(self, omega, n, s, t):
        p = ApproxParams(omega, n, s)
        h = 1e-6
        fd = (approx_solution(p, t + h, self.g).values - approx_solution(p, t - h, self.g).values) / (2 * h)
        assert np.allclose(approx_time_derivative(p, t, self.g).values, fd, atol=1e-8)

    def test_omega_minus_sign(self):
        # ω n^{-s}/14 · sin(nx + ωt) at ω = -1, n = 2, s = 2, t = 0 is -sin(2x)/56
        du = approx_time_derivative(ApproxParams(-1, 2, 2), 0.0, self.g)
        assert np.allclose(du.values, -np.sin(2 * self.g.points) / 56, atol=1e-16)

    def test_no_mean(self):
        assert approx_time_derivative(ApproxParams(1, 3, 2), 0.2, self.g).coefficient(0) == 0


class TestE1:
    g = make_grid(64)

    @pytest.mark.parametrize("sigma", [0.0, 0.75, 1.0])
    def test_norm(self, sigma):
        p = ApproxParams(1, 3, 1.8)
        expected = 3 ** (-2 * 1.8 + 1) / 28 * math.sqrt(math.pi) * (1 + 36) ** (sigma / 2)
        assert sobolev_norm(analytic_E1(p, 0.2, self.g), sigma) == pytest.approx(expected, rel=1e-13)

    def test_sine_parity(self):
        e1 = analytic_E1(ApproxParams(1, 2, 2), 0.0, self.g)
        assert abs(e1.coefficient(4).real) < 1e-18
        assert np.allclose(np.delete(e1.coeffs, [4, 60]), 0)

    def test_amplitude(self):
        e1 = analytic_E1(ApproxParams(1, 1, 2), 0.0, self.g)
        assert np.allclose(e1.values, np.sin(2 * self.g.points) / 28, atol=1e-16)


def e2_by_quadrature(p: ApproxParams, t: float, m: int = 4096) -> dict[int, complex]:
    """E2 coefficients from pointwise closed-form integrand and trapezoid sums."""
    x = 2 * np.pi * np.arange(m) / m
    th = p.n * x + p.omega * t
    a = p.n ** (-p.s)
    u = (p.omega / p.n - 1 - a * np.cos(th)) / 14
    ux = a * p.n * np.sin(th) / 14
    uxx = a * p.n**2 * np.cos(th) / 14
    f = 14 * ux * uxx - 12 * u**3 * ux + 6 * u**2 * ux - 20 * u * ux - 2 * ux
    out = {}
    for j in range(-4, 5):
        k = j * p.n
        ck = np.sum(f * np.exp(-1j * k * x)) / m
        out[k] = ck / (1 + k * k)
    return out


class TestE2:
    def test_quadrature_oracle(self):
        p = ApproxParams(1, 4, 2)
        g = make_grid(64)
        e2 = analytic_E2(p, 0.0, g)
        for k, c in e2_by_quadrature(p, 0.0).items():
            assert abs(e2.coefficient(k) - c) <= 1e-10

    @pytest.mark.parametrize("omega,n,s,t", [(-1, 3, 1.6, 0.3), (1, 7, 2.5, 1.0)])
    def test_quadrature_oracle_more(self, omega, n, s, t):
        p = ApproxParams(omega, n, s)
        harm = e2_harmonics(p, t)
        for k, c in e2_by_quadrature(p, t).items():
            assert abs(harm[k] - c) <= 1e-12

    def test_only_harmonics_of_n(self):
        p = ApproxParams(1, 3, 2)
        e2 = analytic_E2(p, 0.5, make_grid(64))
        active = {int(k) for k, c in zip(e2.grid.wavenumbers, e2.coeffs) if abs(c) > 0}
        assert active <= {3 * j for j in range(-4, 5)}

    def test_lambda_symbol_factor(self):
        # undo Λ⁻²; the quadrature integrand coefficients must then appear
        p = ApproxParams(-1, 2, 2)
        harm = e2_harmonics(p, 0.1)
        raw = {k: c * (1 + k * k) for k, c in e2_by_quadrature(p, 0.1).items()}
        for k, c in harm.items():
            assert c * (1 + k * k) == pytest.approx(raw[k], abs=1e-13)

    def test_resolution_guard(self):
        with pytest.raises(ValueError):
            analytic_E2(ApproxParams(1, 5, 2), 0.0, make_grid(32))


class TestResidual:
    def test_matches_closed_form_norm(self):
        g = make_grid(256)
        p = ApproxParams(1, 16, 2)
        e = residual_E(p, 0.3, g)
        closed = analytic_E1(p, 0.3, g) - analytic_E2(p, 0.3, g)
        assert sobolev_norm(e, 1) == pytest.approx(sobolev_norm(closed, 1), rel=1e-11)

    def test_decomposition_matrix(self):
        g = make_grid(512)
        for omega in (1, -1):
            for n in E_MATRIX_N:
                for s in E_MATRIX_S:
                    for t in E_MATRIX_T:
                        p = ApproxParams(omega, n, s)
                        e1 = analytic_E1(p, t, g)
                        diff = residual_E(p, t, g) - (e1 - analytic_E2(p, t, g))
                        assert sobolev_norm(diff, 0) <= 1e-11 * sobolev_norm(e1, 0)

    @pytest.mark.parametrize("s,expected", [(2.0, -2.0), (1.75, -1.5), (2.5, -2.5)])
    def test_rate_slope(self, s, expected):
        g = make_grid(512)
        ns = [8, 16, 32, 64]
        fit = fit_rate([(n, sobolev_norm(residual_E(ApproxParams(1, n, s), 0.3, g), 1)) for n in ns])
        assert abs(fit.slope - expected) <= 0.2
        assert rate_exponent(s, 1.0) == expected


class TestRateBound:
    def test_second_branch(self):
        assert rate_bound(2, 1, 10) == pytest.approx(1e-2)

    def test_first_branch(self):
        assert rate_bound(1.75, 1, 10) == pytest.approx(10**-1.5)

    def test_n1(self):
        assert rate_bound(2, 1, 1) == 1.0

    @pytest.mark.parametrize("sigma", [0.5, 1.2])
    def test_sigma_range(self, sigma):
        with pytest.raises(ValueError):
            rate_bound(2, sigma, 3)
