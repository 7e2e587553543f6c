"""Integration of the dispersive KPZ equation for the condensate phase,

    d^2(theta)/dt^2 = c^2 d^2(theta)/dx^2 + c^2*lambda*(d theta/dx)^2,

with c = sqrt(2) in natural units, plus the analytic blow-up oracles used
to validate it: a first-order nonlinear transport equation with an exact
solution, and the parabolic solution family whose coefficients obey a
particle-in-a-cubic-potential ODE.

Generic solutions with positive phase-rate excursions diverge in finite
time; the integrator reports that blow-up time instead of failing. The
density deviation tracked by the phase is delta_rho = -(rho0*tau/2) *
d(theta)/dt.

Spatial derivatives are second-order central differences (the quadratic
nonlinearity near blow-up has broadband content that spectral
differentiation handles poorly), time stepping is classical RK4 with CFL
dt <= 0.5*dx/c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .fields import Grid1D, RHO0, SOUND_SPEED, TAU, XI

C2 = SOUND_SPEED**2
BLOWUP_THRESHOLD = 1e6 / TAU


class CflError(ValueError):
    """Time step violates the CFL stability bound."""


@dataclass
class KpzState:
    grid: Grid1D
    theta: np.ndarray
    theta_dot: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.theta_dot = np.asarray(self.theta_dot, dtype=float)
        n = self.grid.n_points
        if self.theta.shape != (n,) or self.theta_dot.shape != (n,):
            raise ValueError("theta/theta_dot length must match grid.n_points")

    def density(self) -> np.ndarray:
        """rho recovered from delta_rho = -(rho0*tau/2) d(theta)/dt."""
        return RHO0 * (1.0 - 0.5 * TAU * self.theta_dot)


def kpz_init_from_density(grid: Grid1D, delta_rho: np.ndarray) -> KpzState:
    """State with theta = 0 whose phase rate encodes the density deviation."""
    delta_rho = np.asarray(delta_rho, dtype=float)
    if np.max(np.abs(delta_rho)) >= RHO0:
        raise ValueError("|delta_rho| must stay below rho0")
    theta_dot = -(2.0 / (RHO0 * TAU)) * delta_rho
    return KpzState(grid=grid, theta=np.zeros(grid.n_points), theta_dot=theta_dot)


def cfl_limit(grid: Grid1D) -> float:
    return 0.5 * grid.dx / SOUND_SPEED


def _rhs(theta, theta_dot, dx, lam):
    d1 = (np.roll(theta, -1) - np.roll(theta, 1)) / (2.0 * dx)
    d2 = (np.roll(theta, -1) - 2.0 * theta + np.roll(theta, 1)) / dx**2
    return theta_dot, C2 * d2 + C2 * lam * d1 * d1


def step_kpz(state: KpzState, dt: float, lam: float) -> KpzState:
    """One classical RK4 step of the first-order (theta, theta_dot) system."""
    if dt > cfl_limit(state.grid) * (1.0 + 1e-12):
        raise CflError(f"dt = {dt} exceeds CFL bound {cfl_limit(state.grid):g}")
    th, td = state.theta, state.theta_dot
    dx = state.grid.dx
    k1t, k1d = _rhs(th, td, dx, lam)
    k2t, k2d = _rhs(th + 0.5 * dt * k1t, td + 0.5 * dt * k1d, dx, lam)
    k3t, k3d = _rhs(th + 0.5 * dt * k2t, td + 0.5 * dt * k2d, dx, lam)
    k4t, k4d = _rhs(th + dt * k3t, td + dt * k3d, dx, lam)
    th = th + (dt / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
    td = td + (dt / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
    return KpzState(grid=state.grid, theta=th, theta_dot=td, t=state.t + dt)


@dataclass
class KpzConfig:
    grid: Grid1D
    lam: float
    dt: float | None = None  # defaults to the CFL bound
    t_max: float = 100.0
    snapshot_every: float | None = None
    blowup_threshold: float = BLOWUP_THRESHOLD

    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else cfl_limit(self.grid)


@dataclass
class KpzTrajectory:
    config: KpzConfig
    snapshots: list  # of (t, theta array, theta_dot array)
    max_rate_series: np.ndarray  # shape (n, 2): (t, max|theta_dot|)
    blowup_time: float | None
    final: KpzState

    def threshold_crossing(self, threshold: float) -> float | None:
        """First recorded time max|theta_dot| exceeded `threshold`."""
        s = self.max_rate_series
        hit = np.flatnonzero(~np.isfinite(s[:, 1]) | (s[:, 1] > threshold))
        return float(s[hit[0], 0]) if hit.size else None


def run_kpz(cfg: KpzConfig, state: KpzState) -> KpzTrajectory:
    """Integrate until t_max, or until max|theta_dot| crosses the blow-up
    threshold (or goes non-finite), whichever is first. The crossing step
    time is reported as the blow-up time."""
    dt = cfg.resolved_dt()
    if dt > cfl_limit(cfg.grid) * (1.0 + 1e-12):
        raise CflError(f"dt = {dt} exceeds CFL bound {cfl_limit(cfg.grid):g}")
    snap_stride = None
    if cfg.snapshot_every is not None:
        snap_stride = max(1, int(round(cfg.snapshot_every / dt)))

    n_steps = int(round(cfg.t_max / dt))
    times = np.zeros(n_steps + 1)
    rates = np.zeros(n_steps + 1)
    snapshots = []
    rates[0] = np.max(np.abs(state.theta_dot))
    if snap_stride is not None:
        snapshots.append((state.t, state.theta.copy(), state.theta_dot.copy()))

    blowup_time = None
    n_done = 0
    for i in range(1, n_steps + 1):
        state = step_kpz(state, dt, cfg.lam)
        times[i] = i * dt
        m = np.max(np.abs(state.theta_dot))
        rates[i] = m
        n_done = i
        if snap_stride is not None and i % snap_stride == 0:
            snapshots.append((state.t, state.theta.copy(), state.theta_dot.copy()))
        if not np.isfinite(m) or m > cfg.blowup_threshold:
            blowup_time = float(times[i])
            break

    n = n_done + 1
    return KpzTrajectory(
        config=cfg,
        snapshots=snapshots,
        max_rate_series=np.column_stack([times[:n], rates[:n]]),
        blowup_time=blowup_time,
        final=state,
    )


# ---------------------------------------------------------------------------
# Toy first-order wave equation  d(th)/dt = d(th)/dx + lambda*th^2
# (left-moving transport with a quadratic reaction; exact solution along
# characteristics: th(x0 - t, t) = th0 / (1 - lambda*th0*t))
# ---------------------------------------------------------------------------

def _periodic_sample(values: np.ndarray, shift_points: float) -> np.ndarray:
    """values sampled at index + shift_points, periodic linear interpolation."""
    i0 = int(np.floor(shift_points))
    frac = shift_points - i0
    lo = np.roll(values, -i0)
    if frac == 0.0:
        return lo.copy()
    hi = np.roll(values, -(i0 + 1))
    return (1.0 - frac) * lo + frac * hi


def toy_wave_exact(grid: Grid1D, theta0: np.ndarray, t: float, lam: float) -> np.ndarray:
    """Exact solution, evaluated per grid point with periodic linear
    interpolation for non-grid displacements. Raises at/after blow-up."""
    theta0 = np.asarray(theta0, dtype=float)
    peak = np.max(theta0)
    if lam * peak > 0 and t >= 1.0 / (lam * peak):
        raise ValueError(f"t = {t} is at/after the blow-up time {1.0 / (lam * peak):g}")
    shifted = _periodic_sample(theta0, t / grid.dx)
    denom = 1.0 - lam * shifted * t
    if np.any(denom <= 0):
        raise ValueError("interpolated profile already blew up at this t")
    return shifted / denom


def toy_wave_numeric(grid: Grid1D, theta0: np.ndarray, dt: float, t: float,
                     lam: float) -> np.ndarray:
    """Split stepping: first-order upwind transport (exact shift at unit
    CFL dt = dx), then RK4 for the pointwise reaction d(th)/dt = lam*th^2."""
    if dt > grid.dx * (1.0 + 1e-12):
        raise CflError(f"dt = {dt} exceeds the transport CFL bound dx = {grid.dx}")
    th = np.asarray(theta0, dtype=float).copy()
    n_full = int(np.floor(t / dt + 1e-12))
    leftovers = t - n_full * dt

    def substeps(th, step):
        nu = step / grid.dx
        th = th + nu * (np.roll(th, -1) - th)
        k1 = lam * th**2
        k2 = lam * (th + 0.5 * step * k1) ** 2
        k3 = lam * (th + 0.5 * step * k2) ** 2
        k4 = lam * (th + step * k3) ** 2
        return th + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    for _ in range(n_full):
        th = substeps(th, dt)
    if leftovers > 1e-12:
        th = substeps(th, leftovers)
    return th


# ---------------------------------------------------------------------------
# Parabolic solution family theta(x, t) = a(t) x^2 + b(t), with
#   a'' = 8*lambda*a^2,   b'' = 4*a        (xi = tau = 1)
# The curvature obeys motion in the cubic potential U(a) = -8*lambda*a^3/3,
# so E = a_dot^2/2 + U(a) is conserved and generic trajectories escape to
# a = +infinity in finite time.
# ---------------------------------------------------------------------------

@dataclass
class ParabolaCoeffs:
    a: float
    b: float = 0.0
    a_dot: float = 0.0
    b_dot: float = 0.0

    def theta(self, x: np.ndarray) -> np.ndarray:
        return self.a * x**2 + self.b

    def theta_dot(self, x: np.ndarray) -> np.ndarray:
        return self.a_dot * x**2 + self.b_dot


class DivergedError(RuntimeError):
    """Parabola curvature escaped to infinity before the requested time."""


def _parabola_energy(coeffs: ParabolaCoeffs, lam: float) -> float:
    return 0.5 * coeffs.a_dot**2 - (8.0 * lam / 3.0) * coeffs.a**3


def parabola_evolve(coeffs: ParabolaCoeffs, t: float, lam: float,
                    a_escape: float = 1e12) -> ParabolaCoeffs:
    """Coefficients at time t by adaptive RK integration (tol 1e-10)."""
    if t == 0.0:
        return ParabolaCoeffs(coeffs.a, coeffs.b, coeffs.a_dot, coeffs.b_dot)

    def rhs(_t, y):
        a, a_dot, b, b_dot = y
        return [a_dot, 8.0 * lam * XI**2 / TAU**2 * a**2, b_dot,
                4.0 * XI**2 / TAU**2 * a]

    def escaped(_t, y):
        return y[0] - a_escape

    escaped.terminal = True
    sol = solve_ivp(rhs, (0.0, t), [coeffs.a, coeffs.a_dot, coeffs.b, coeffs.b_dot],
                    method="DOP853", rtol=1e-10, atol=1e-10, events=escaped)
    if sol.t_events[0].size > 0:
        raise DivergedError(
            f"curvature diverged at t = {sol.t_events[0][0]:g} before requested t = {t:g}")
    if not sol.success:
        raise RuntimeError(f"ODE integration failed: {sol.message}")
    a, a_dot, b, b_dot = sol.y[:, -1]
    return ParabolaCoeffs(a=a, b=b, a_dot=a_dot, b_dot=b_dot)


def parabola_escape_time(coeffs: ParabolaCoeffs, lam: float, a_stop: float) -> float:
    """Time for the curvature to first reach a_stop, by ODE integration.
    Independent cross-check for parabola_blowup_time."""

    def rhs(_t, y):
        return [y[1], 8.0 * lam * y[0] ** 2]

    def reached(_t, y):
        return y[0] - a_stop

    reached.terminal = True
    # crude upper bound on the escape time: fall time from rest near a=0
    # plus the tail; generous horizon instead
    sol = solve_ivp(rhs, (0.0, 1e6), [coeffs.a, coeffs.a_dot], method="DOP853",
                    rtol=1e-12, atol=1e-12, events=reached)
    if sol.t_events[0].size == 0:
        raise DivergedError("curvature never reached a_stop within the horizon")
    return float(sol.t_events[0][0])


def parabola_blowup_time(coeffs: ParabolaCoeffs, lam: float,
                         a_max: float = np.inf) -> float:
    """Divergence time by adaptive quadrature of dt = da / sqrt(2(E - U(a))),
    split at the turning point when the curvature starts moving downward.

    a_max < inf gives the time to reach a_max instead (the full divergence
    time is the a_max -> inf limit; the tail beyond A falls off as A^-1/2).
    """
    if lam <= 0:
        raise ValueError("blow-up requires lambda > 0")
    E = _parabola_energy(coeffs, lam)
    a0, a_dot0 = coeffs.a, coeffs.a_dot
    if E == 0.0 and a_dot0 <= 0.0:
        # on the separatrix rolling toward the flat point at a = 0 (or
        # sitting on it): never diverges
        raise DivergedError("trajectory never diverges (E = 0 moving uphill)")

    def inv_speed_sq(u: np.ndarray, lo: float) -> np.ndarray:
        # integrand after the substitution a = lo + u^2 (removes the
        # 1/sqrt turning-point singularity): dt = 2u du / sqrt(2(E-U))
        a = lo + u * u
        return 2.0 * u / np.sqrt(2.0 * (E + (8.0 * lam / 3.0) * a**3))

    def upward_time(lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        u_hi = np.sqrt(hi - lo) if np.isfinite(hi) else np.inf
        val, _err = quad(inv_speed_sq, 0.0, u_hi, args=(lo,), epsabs=0.0,
                         epsrel=1e-9, limit=400)
        return val

    if a_dot0 >= 0.0:
        return upward_time(a0, a_max)
    a_turn = float(np.cbrt(-3.0 * E / (8.0 * lam)))
    return upward_time(a_turn, a0) + upward_time(a_turn, a_max)


# ---------------------------------------------------------------------------
# Light-cone causality
# ---------------------------------------------------------------------------

def causality_radius_check(grid: Grid1D, ic_a, ic_b, r0: float, t: float,
                           lam: float, dt: float | None = None,
                           tol: float = 1e-9) -> float | None:
    """Evolve two initial conditions that agree outside |x| <= r0 to time t
    and locate the largest |x| - r0 at which either field differs by more
    than `tol`. None if the solutions agree everywhere."""
    cfg = KpzConfig(grid=grid, lam=lam, dt=dt, t_max=t)
    theta_a, theta_dot_a = ic_a
    theta_b, theta_dot_b = ic_b
    fin_a = run_kpz(cfg, KpzState(grid, theta_a, theta_dot_a)).final
    fin_b = run_kpz(cfg, KpzState(grid, theta_b, theta_dot_b)).final
    differ = (np.abs(fin_a.theta - fin_b.theta) > tol) | (
        np.abs(fin_a.theta_dot - fin_b.theta_dot) > tol)
    if not differ.any():
        return None
    return float(np.max(np.abs(grid.x[differ])) - r0)
