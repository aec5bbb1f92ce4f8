"""Classical RK4 time stepping of the nonlocal Cauchy problem."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import h1_energy, max_transport_speed, rhs
from .spectral import SpectralField, derivative, sobolev_norm

log = logging.getLogger(__name__)

DT_MAX = 1e-2
DT_MIN = 1e-7


@dataclass(frozen=True)
class SolverConfig:
    n_modes: int = 256
    dt: float | str = "auto"
    t_end: float = 1.0
    cfl: float = 0.5
    record_every: int = 1
    breakdown_slope: float = 1e3
    breakdown_norm_factor: float = 1e2
    s: float = 2.0
    dt_max: float = DT_MAX

    def __post_init__(self):
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ValueError("dt must be a positive number or 'auto'")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.cfl > 0:
            raise ValueError("cfl must be positive")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")
        if not (self.breakdown_slope > 0 and self.breakdown_norm_factor > 0):
            raise ValueError("breakdown thresholds must be positive")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[SpectralField] = field(default_factory=list)
    h1_series: list[float] = field(default_factory=list)
    hs_series: list[float] = field(default_factory=list)
    min_slope_series: list[float] = field(default_factory=list)
    status: str = "completed"
    status_time: float | None = None
    reason: str = ""
    steps: int = 0

    def record(self, t: float, u: SpectralField, s: float):
        self.times.append(float(t))
        self.states.append(u)
        self.h1_series.append(h1_energy(u))
        self.hs_series.append(sobolev_norm(u, s))
        self.min_slope_series.append(min_slope(u))

    @property
    def h1_drift(self) -> np.ndarray:
        """|h1(t) - h1(0)| / h1(0) at every recorded time (zeros if h1(0) = 0)."""
        h1 = np.asarray(self.h1_series)
        if h1[0] == 0.0:
            return np.abs(h1)
        return np.abs(h1 - h1[0]) / h1[0]

    @property
    def final(self) -> SpectralField:
        return self.states[-1]

    def state_at(self, t: float, atol: float = 1e-12) -> SpectralField:
        idx = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[idx] - t) > atol:
            raise KeyError(f"no recorded state at t = {t}")
        return self.states[idx]


def min_slope(u: SpectralField) -> float:
    return float(np.min(derivative(u, 1).values))


def step_rk4(u: SpectralField, dt: float) -> SpectralField:
    if not dt > 0:
        raise ValueError("dt must be positive")
    k1 = rhs(u)
    k2 = rhs(u + (0.5 * dt) * k1)
    k3 = rhs(u + (0.5 * dt) * k2)
    k4 = rhs(u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def cfl_dt(u: SpectralField, cfl: float = 0.5, dt_max: float = DT_MAX, dt_min: float = DT_MIN) -> float:
    """dt = cfl / (k_max · max|1 + 14u|), clipped to [dt_min, dt_max]."""
    rate = u.grid.k_max * max_transport_speed(u)
    dt = dt_max if rate == 0.0 else min(cfl / rate, dt_max)
    if dt < dt_min:
        warnings.warn(f"CFL step {dt:.3e} floored at {dt_min:.1e}", RuntimeWarning, stacklevel=2)
        dt = dt_min
    return dt


def _breakdown(u: SpectralField, hs0: float, cfg: SolverConfig) -> tuple[str, str] | None:
    if not np.all(np.isfinite(u.coeffs)):
        return "nan", "non-finite coefficients"
    slope = min_slope(u)
    if slope <= -cfg.breakdown_slope:
        return "breakdown", f"min slope {slope:.3e} below -{cfg.breakdown_slope:g}"
    if hs0 > 0.0:
        hs = sobolev_norm(u, cfg.s)
        if hs >= cfg.breakdown_norm_factor * hs0:
            return "breakdown", (
                f"H^{cfg.s:g} norm {hs:.3e} reached {cfg.breakdown_norm_factor:g}x initial"
            )
    return None


def simulate(u0: SpectralField, cfg: SolverConfig, save_times: Sequence[float] = ()) -> Trajectory:
    """Integrate from t = 0 to ``cfg.t_end``.

    States are recorded at t = 0, every ``cfg.record_every`` steps, at each
    time in ``save_times`` (steps are shortened to land on them exactly) and
    at the final time. The run stops early with status ``"breakdown"`` or
    ``"nan"`` when a breakdown criterion fires; the offending state is
    recorded as the last sample.
    """
    if u0.grid.n_modes != cfg.n_modes:
        raise ValueError(f"initial data has {u0.grid.n_modes} modes, config expects {cfg.n_modes}")
    if not np.all(np.isfinite(u0.coeffs)):
        raise ValueError("initial data is not finite")
    stops = sorted({float(t) for t in save_times if 0.0 < t < cfg.t_end} | {float(cfg.t_end)})
    if any(t < 0 or t > cfg.t_end for t in save_times):
        raise ValueError("save_times must lie in [0, t_end]")

    traj = Trajectory()
    traj.record(0.0, u0, cfg.s)
    hs0 = traj.hs_series[0]
    u, t, step = u0, 0.0, 0
    eps = 1e-12 * cfg.t_end
    for stop in stops:
        while t < stop - eps:
            dt = cfl_dt(u, cfg.cfl, cfg.dt_max) if cfg.dt == "auto" else float(cfg.dt)
            landing = t + dt >= stop - eps
            if landing:
                dt = stop - t
            u = step_rk4(u, dt)
            t = stop if landing else t + dt
            step += 1
            bad = _breakdown(u, hs0, cfg)
            if bad is not None:
                traj.status, traj.reason = bad
                traj.status_time = t
                traj.steps = step
                traj.record(t, u, cfg.s)
                log.info("run stopped at t=%.6g: %s", t, traj.reason)
                return traj
            if landing or step % cfg.record_every == 0:
                traj.record(t, u, cfg.s)
    traj.steps = step
    return traj


def t0_from_norms(h1: float, hs: float, C: float = 1.0) -> float:
    if not (h1 > 0 and hs > 0):
        raise ValueError("norms must be positive (initial data must be nonzero)")
    if not C > 0:
        raise ValueError("C must be positive")
    h5 = h1**5
    return h5 / (2.0 * C * (1.0 + h5) * hs**3)


def t0_lower_bound(u0: SpectralField, s: float, C: float = 1.0) -> float:
    """Existence-time lower bound ‖u0‖⁵_{H¹} / (2C(1+‖u0‖⁵_{H¹})‖u0‖³_{H^s}).

    ``C`` is the abstract constant of the well-posedness estimate; the
    result is structural, not a quantitative prediction.
    """
    return t0_from_norms(h1_energy(u0), sobolev_norm(u0, s), C)


def _fixed_step_run(u0: SpectralField, t_end: float, dt: float) -> SpectralField:
    steps = int(round(t_end / dt))
    if not np.isclose(steps * dt, t_end, rtol=1e-10, atol=0.0):
        raise ValueError(f"dt = {dt} does not divide t_end = {t_end}")
    u = u0
    h = t_end / steps
    for _ in range(steps):
        u = step_rk4(u, h)
    return u


@dataclass(frozen=True)
class ConvergenceOrder:
    order: float
    dts: tuple[float, ...]
    errors: tuple[float, ...]
    monotone: bool


def measure_convergence_order(u0: SpectralField, t_end: float, dt_list: Sequence[float]) -> ConvergenceOrder:
    """Observed temporal order from errors against the finest-dt run.

    ``order`` is the least-squares slope of log(error) against log(dt) over
    all but the finest step; it is NaN when every error vanishes.
    """
    dts = sorted((float(d) for d in dt_list), reverse=True)
    if len(dts) < 3:
        raise ValueError("need >= 3 dt values")
    ratios = np.array(dts[:-1]) / np.array(dts[1:])
    if not np.allclose(ratios, 2.0, rtol=1e-9):
        raise ValueError("dt values must halve successively")
    sols = [_fixed_step_run(u0, t_end, dt) for dt in dts]
    ref = sols[-1]
    errors = tuple(sobolev_norm(u - ref, 0.0) for u in sols[:-1])
    monotone = all(a > b for a, b in zip(errors, errors[1:]))
    if not monotone:
        log.warning("errors are not monotone in dt: %s", errors)
    if all(e == 0.0 for e in errors):
        return ConvergenceOrder(float("nan"), tuple(dts), errors, monotone)
    e = np.asarray(errors)
    ok = e > 0
    if ok.sum() < 2:
        return ConvergenceOrder(float("nan"), tuple(dts), errors, monotone)
    slope = np.polyfit(np.log(np.asarray(dts[:-1])[ok]), np.log(e[ok]), 1)[0]
    return ConvergenceOrder(float(slope), tuple(dts), errors, monotone)
