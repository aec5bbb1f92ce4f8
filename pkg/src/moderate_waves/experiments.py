"""Quantitative studies: error-decay rates and non-uniform dependence on data.

Each study runs the exact (numerical) solutions u_{ω,n} started from the
approximate-family data u^{ω,n}(0) and compares them with the closed-form
approximations and with the lower bound on the gap between ω = +1 and
ω = -1. Simulations over n are independent and may run on a thread pool;
results are always reduced in the order of ``n_list``.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .approx import ApproxParams, approx_solution, rate_exponent, residual_E
from .integrator import SolverConfig, Trajectory, simulate
from .spectral import SpectralField, SpectralGrid, make_grid, multiply, sobolev_norm

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class RateFit:
    points: tuple[tuple[int, float], ...]
    slope: float
    intercept: float
    r_squared: float
    theoretical_slope: float = float("nan")
    branch: str = ""

    def within(self, tol: float) -> bool:
        return abs(self.slope - self.theoretical_slope) <= tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["points"] = [list(p) for p in self.points]
        return d


def fit_rate(points: Sequence[tuple[float, float]], theoretical_slope: float = float("nan"), branch: str = "") -> RateFit:
    """Least-squares line through (log n, log value)."""
    if len(points) < 3:
        raise ValueError("need >= 3 points")
    n = np.array([p[0] for p in points], dtype=float)
    v = np.array([p[1] for p in points], dtype=float)
    if np.any(v <= 0) or np.any(n <= 0):
        raise ValueError("rate fit needs positive n and values")
    x, y = np.log(n), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return RateFit(
        points=tuple((int(a), float(b)) for a, b in points),
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        theoretical_slope=float(theoretical_slope),
        branch=branch,
    )


# -- closed forms ----------------------------------------------------------------------


def initial_gap(n: int, s: float) -> float:
    """‖u^{1,n}(0) - u^{-1,n}(0)‖_{H^s} = √(2π)/(7n), independent of s."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return SQRT_2PI / (7.0 * n)


def measured_initial_gap(n: int, s: float, grid: SpectralGrid) -> float:
    plus = approx_solution(ApproxParams(1, n, s), 0.0, grid)
    minus = approx_solution(ApproxParams(-1, n, s), 0.0, grid)
    return sobolev_norm(plus - minus, s)


def gap_lower_bound(t: float, n: int) -> float:
    """(√π/7)|sin t| - √(2π)/(7n); may be negative."""
    return SQRT_PI * abs(math.sin(t)) / 7.0 - SQRT_2PI / (7.0 * n)


def approx_gap(n: int, s: float, t: float, grid: SpectralGrid) -> float:
    """Gap between the two approximate solutions, no time stepping involved."""
    plus = approx_solution(ApproxParams(1, n, s), t, grid)
    minus = approx_solution(ApproxParams(-1, n, s), t, grid)
    return sobolev_norm(plus - minus, s)


def initial_norm_sandwich(n: int, s: float) -> tuple[float, float]:
    """Finite-n bounds on ‖u^{ω,n}(0)‖_{H^s}.

    Uses |‖u(0)‖ - √(2π)/14| <= δ(n) with δ(n) = (√(2π)/n + n^{-s}√π(1+n²)^{s/2})/14,
    widened to the limiting bracket [√π/28, √(2π)/7].
    """
    delta = (SQRT_2PI / n + n ** (-s) * SQRT_PI * (1.0 + n * n) ** (s / 2.0)) / 14.0
    return SQRT_PI / 28.0 - delta, SQRT_2PI / 7.0 + delta


def check_interpolation(u: SpectralField, r1: float, r: float, r2: float, rtol: float = 1e-12) -> tuple[bool, float]:
    """Test ‖u‖_{H^r} <= ‖u‖_{H^{r1}}^{θ} ‖u‖_{H^{r2}}^{1-θ}, θ = (r2-r)/(r2-r1).

    Returns (holds, lhs/rhs); the ratio is 0 for u = 0.
    """
    if not r1 < r < r2:
        raise ValueError("need r1 < r < r2")
    theta = (r2 - r) / (r2 - r1)
    lhs = sobolev_norm(u, r)
    rhs = sobolev_norm(u, r1) ** theta * sobolev_norm(u, r2) ** (1.0 - theta)
    if rhs == 0.0:
        return lhs == 0.0, 0.0
    return lhs <= rhs * (1.0 + rtol), lhs / rhs


def random_trig_polynomial(grid: SpectralGrid, rng: np.random.Generator, max_mode: int | None = None) -> SpectralField:
    """Real trigonometric polynomial with random degree and Gaussian coefficients."""
    top = grid.k_max - 1 if max_mode is None else max_mode
    degree = int(rng.integers(1, top + 1))
    c = np.zeros(grid.n_modes, dtype=np.complex128)
    k = np.arange(degree + 1)
    c[k] = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    c[0] = c[0].real
    c[-k[1:]] = np.conj(c[k[1:]])
    return SpectralField(grid, c)


def probe_multiplier_inequality(grid: SpectralGrid, rng: np.random.Generator, n_samples: int = 1000, t: float = 1.0, r: float = 2.0) -> float:
    """Empirical max of ‖fg‖_{H^t} / (‖f‖_{H^t}‖g‖_{H^r}) over random band-limited pairs."""
    worst = 0.0
    band = grid.n_modes // 4
    for _ in range(n_samples):
        f = random_trig_polynomial(grid, rng, band)
        g = random_trig_polynomial(grid, rng, band)
        ratio = sobolev_norm(multiply(f, g), t) / (sobolev_norm(f, t) * sobolev_norm(g, r))
        worst = max(worst, ratio)
    return worst


# -- simulations -------------------------------------------------------------------------


def _map(func: Callable, items: Sequence, threads: int = 1) -> list:
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def config_fingerprint(cfg: SolverConfig, **extra) -> str:
    payload = json.dumps({"solver": asdict(cfg), **extra}, sort_keys=True, default=repr)
    return hashlib.sha256(payload.encode()).hexdigest()


def _check_n_list(n_list: Sequence[int], grid: SpectralGrid, need: int = 3):
    if len(n_list) < need:
        raise ValueError(f"need >= {need} points")
    for n in n_list:
        if 8 * n > grid.n_modes:
            raise ValueError(f"resolution: n = {n} exceeds N/8 = {grid.n_modes // 8}")


def residual_rate_study(s: float, sigma: float, n_list: Sequence[int], t: float = 0.0, omega: int = 1, n_modes: int | None = None) -> RateFit:
    """‖E‖_{H^σ} against n; no time stepping."""
    if len(n_list) < 3:
        raise ValueError("need >= 3 points")
    theory = rate_exponent(s, sigma)
    grid = make_grid(n_modes or 8 * max(n_list))
    _check_n_list(n_list, grid)
    pts = [(n, sobolev_norm(residual_E(ApproxParams(omega, n, s), t, grid), sigma)) for n in n_list]
    branch = "3/2<s<2: -2s+1+sigma" if s < 2 else "s>=2: -s-1+sigma"
    return fit_rate(pts, theory, branch)


def _approx_errors(p: ApproxParams, cfg: SolverConfig, t_probe: Sequence[float], sigmas: Sequence[float]) -> tuple[list[float], Trajectory]:
    grid = make_grid(cfg.n_modes)
    u0 = approx_solution(p, 0.0, grid)
    traj = simulate(u0, replace(cfg, t_end=max(t_probe), s=p.s), t_probe)
    if traj.status != "completed":
        raise RuntimeError(f"n = {p.n}, omega = {p.omega}: {traj.status} ({traj.reason})")
    errs = []
    for sig in sigmas:
        errs.append(max(sobolev_norm(approx_solution(p, t, grid) - traj.state_at(t), sig) for t in t_probe))
    return errs, traj


def default_sigma(s: float) -> float:
    return 1.0 if s >= 2.0 else s - 1.0


def run_error_decay_study(s: float, sigma: float | None, n_list: Sequence[int], t_probe: Sequence[float], cfg: SolverConfig, omega: int = 1, threads: int = 1) -> RateFit:
    """max_t ‖u^{ω,n}(t) - u_{ω,n}(t)‖_{H^σ} against n; expected slope -s."""
    sigma = default_sigma(s) if sigma is None else sigma
    if s >= 2.0 and sigma != 1.0:
        raise ValueError("sigma must be 1 when s >= 2")
    if 1.5 < s < 2.0 and not 0.5 < sigma <= s - 1.0:
        raise ValueError("sigma must lie in (1/2, s-1] when 3/2 < s < 2")
    grid = make_grid(cfg.n_modes)
    _check_n_list(n_list, grid)
    errs = _map(lambda n: _approx_errors(ApproxParams(omega, n, s), cfg, t_probe, [sigma])[0][0], list(n_list), threads)
    branch = "H^1, s>=2" if s >= 2 else f"H^{sigma:g}, 3/2<s<2"
    return fit_rate(list(zip(n_list, errs)), -s, branch)


@dataclass(frozen=True)
class GrowthStudy:
    fit: RateFit
    initial_hk_norms: tuple[float, ...]
    initial_hk_constant: float


def run_hk_growth_study(s: float, n_list: Sequence[int], cfg: SolverConfig, t_probe: Sequence[float] = (0.1, 0.2, 0.3, 0.4, 0.5), omega: int = 1, threads: int = 1) -> GrowthStudy:
    """Error in H^k, k = s + 2, against n; the bound is n² (upper bound only)."""
    k = s + 2.0
    grid = make_grid(cfg.n_modes)
    _check_n_list(n_list, grid)
    errs = _map(lambda n: _approx_errors(ApproxParams(omega, n, s), cfg, t_probe, [k])[0][0], list(n_list), threads)
    init = tuple(sobolev_norm(approx_solution(ApproxParams(omega, n, s), 0.0, grid), k) for n in n_list)
    const = max(v / n ** (k - s) for v, n in zip(init, n_list))
    fit = fit_rate(list(zip(n_list, errs)), 2.0, "H^{s+2} growth, upper bound")
    return GrowthStudy(fit, init, const)


@dataclass
class NonuniformReport:
    s: float
    n_list: list[int]
    t_grid: list[float]
    gap_matrix: list[list[float]]
    lower_bound_matrix: list[list[float]]
    surrogate_gap_matrix: list[list[float]]
    initial_gaps: list[float]
    closed_form_initial_gaps: list[float]
    max_norm: list[float]
    initial_norm: list[float]
    interpolation_ok: list[bool]
    status: list[str]
    horizon: float
    epsilon: float
    solver_fingerprint: str
    refinement: dict = field(default_factory=dict)

    def margins(self) -> np.ndarray:
        return np.asarray(self.gap_matrix) - np.asarray(self.lower_bound_matrix)

    def cell_ok(self) -> np.ndarray:
        return self.margins() >= -self.epsilon

    @property
    def bounded(self) -> bool:
        """Every H^s norm stays within twice its initial value."""
        return all(m <= 2.0 * m0 for m, m0 in zip(self.max_norm, self.initial_norm))

    @property
    def limit_bound(self) -> list[float]:
        """n → ∞ limit (√π/7)|sin t| of the lower bound, reported only."""
        return [SQRT_PI * abs(math.sin(t)) / 7.0 for t in self.t_grid]


def _pair_run(n: int, s: float, t_grid: Sequence[float], cfg: SolverConfig) -> dict:
    grid = make_grid(cfg.n_modes)
    k = s + 2.0
    saves = [t for t in t_grid if t > 0]
    trajs = {}
    for omega in (1, -1):
        u0 = approx_solution(ApproxParams(omega, n, s), 0.0, grid)
        trajs[omega] = simulate(u0, cfg, saves)
    status = "completed"
    for tr in trajs.values():
        if tr.status != "completed":
            status = f"{tr.status}@{tr.status_time:.6g}: {tr.reason}"
    gaps, interp = [], True
    for t in t_grid:
        try:
            up, um = trajs[1].state_at(t), trajs[-1].state_at(t)
        except KeyError:
            gaps.append(float("nan"))
            continue
        gaps.append(sobolev_norm(up - um, s))
        for omega, u in ((1, up), (-1, um)):
            v = approx_solution(ApproxParams(omega, n, s), t, grid) - u
            interp &= check_interpolation(v, 1.0, s, k)[0]
    max_norm = max(max(tr.hs_series) for tr in trajs.values())
    init_norm = max(tr.hs_series[0] for tr in trajs.values())
    return dict(gaps=gaps, interp=interp, status=status, max_norm=max_norm, init_norm=init_norm)


def run_nonuniform_study(
    s: float,
    n_list: Sequence[int],
    t_grid: Sequence[float],
    cfg: SolverConfig,
    epsilon: float = 0.02,
    refine: bool = True,
    threads: int = 1,
) -> NonuniformReport:
    """Simulate u_{±1,n} for each n and compare their H^s gap with the lower bound.

    The run enforces the doubling bound ‖u(t)‖_{H^s} <= 2‖u(0)‖_{H^s}: a
    violation stops the simulation with breakdown status. With ``refine``
    the largest n is re-run at 2N and the margin at the last time compared.
    """
    grid = make_grid(cfg.n_modes)
    _check_n_list(n_list, grid, need=1)
    t_grid = [float(t) for t in t_grid]
    if any(t < 0 for t in t_grid):
        raise ValueError("t_grid must be non-negative")
    horizon = max(t_grid)
    if not horizon > 0:
        raise ValueError("t_grid needs a positive time")
    run_cfg = replace(
        cfg,
        t_end=horizon,
        s=s,
        breakdown_norm_factor=min(cfg.breakdown_norm_factor, 2.0),
    )
    runs = _map(lambda n: _pair_run(n, s, t_grid, run_cfg), list(n_list), threads)

    report = NonuniformReport(
        s=s,
        n_list=list(n_list),
        t_grid=t_grid,
        gap_matrix=[r["gaps"] for r in runs],
        lower_bound_matrix=[[gap_lower_bound(t, n) for t in t_grid] for n in n_list],
        surrogate_gap_matrix=[[approx_gap(n, s, t, grid) for t in t_grid] for n in n_list],
        initial_gaps=[measured_initial_gap(n, s, grid) for n in n_list],
        closed_form_initial_gaps=[initial_gap(n, s) for n in n_list],
        max_norm=[r["max_norm"] for r in runs],
        initial_norm=[r["init_norm"] for r in runs],
        interpolation_ok=[r["interp"] for r in runs],
        status=[r["status"] for r in runs],
        horizon=horizon,
        epsilon=epsilon,
        solver_fingerprint=config_fingerprint(run_cfg, s=s, n_list=list(n_list), t_grid=t_grid),
    )
    if refine:
        n = max(n_list)
        t = horizon
        fine = _pair_run(n, s, [t], replace(run_cfg, n_modes=2 * cfg.n_modes))
        base_margin = report.gap_matrix[list(n_list).index(n)][t_grid.index(t)] - gap_lower_bound(t, n)
        fine_margin = fine["gaps"][0] - gap_lower_bound(t, n)
        report.refinement = {
            "n": n,
            "t": t,
            "n_modes": 2 * cfg.n_modes,
            "margin": base_margin,
            "refined_margin": fine_margin,
            "violation_grew": bool(max(0.0, -fine_margin) > max(0.0, -base_margin) + 1e-9),
        }
    return report
