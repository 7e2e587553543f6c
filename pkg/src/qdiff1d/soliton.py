"""Dissipative soliton fronts of the hydrodynamic equations

    dt(rho) + dx(rho v) = -(sqrt(2) lam / (xi c)) rho v^2
    dt(v)  + v dx(v)    = -(c^2 / rho0) dx(rho)

Traveling solutions rho(x - ut), v(x - ut) exist only for front speeds
|u| >= c, with the flow opposing the front (v < 0 for u > 0). They
connect rho -> rho0 (ahead) to rho -> 0 (behind) with core width
proportional to xi/lam, so the family is exclusive to lossy condensates.

The velocity profile is given implicitly by an explicit z(v): integrating
the traveling ansatz yields rho(v) = rho0 (1 + u v/c^2 - v^2/(2 c^2)) and

  (sqrt(2) lam / (xi c)) (z - z0) = (1 - u^2/c^2)/v
      - (2 + u^2/c^2)(u/c^2) log|v|
      - [s/(u+s)^2] log|v - u - s| + [s/(u-s)^2] log|v - u + s|,

with s = sqrt(u^2 + 2 c^2). For the sonic front u = c this reduces to
f(v/c) = (sqrt(2) lam / (3 xi)) (z0 - z) with the three-logarithm f below.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .fields import FrontNotFoundError, Grid1D, RHO0, SOUND_SPEED, XI, rightmost_half_crossing

C = SOUND_SPEED
C2 = SOUND_SPEED**2
Y_MIN = 1.0 - np.sqrt(3.0)  # lower edge of the sonic branch, v/c at rho = 0

_COEF_A = (2.0 * np.sqrt(3.0) + 3.0) / 6.0
_COEF_B = (2.0 * np.sqrt(3.0) - 3.0) / 6.0


class InvalidSpeedError(ValueError):
    """No single-valued traveling front exists at this speed."""


class SpeedClass(enum.Enum):
    INVALID = "invalid"
    VALID_V_NEGATIVE = "valid_v_negative"
    VALID_V_POSITIVE = "valid_v_positive"


@dataclass
class SolitonProfile:
    u: float
    z: np.ndarray
    v: np.ndarray
    rho: np.ndarray
    lam: float
    z0: float
    branch: SpeedClass


def soliton_f(y):
    """The sonic-front profile function; monotone decreasing from +inf at
    y -> (1 - sqrt(3))+ to -inf at y -> 0-."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= Y_MIN) or np.any(y >= 0.0):
        raise ValueError(f"y must lie in ({Y_MIN:.6f}, 0)")
    return (
        np.log(-y)
        - _COEF_A * np.log(np.sqrt(3.0) - 1.0 + y)
        + _COEF_B * np.log(np.sqrt(3.0) + 1.0 - y)
    )


def _sonic_y_from_targets(targets: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Invert f(y) = target by bisection on (1-sqrt(3), 0) to |dy| <= tol.

    Targets beyond the floating-point-reachable range of f clamp to the
    exact branch endpoints, where rho = 0 and rho = rho0 hold exactly.
    """
    targets = np.asarray(targets, dtype=float)
    y_lo = Y_MIN + 1e-15
    y_hi = -1e-300
    f_lo = float(soliton_f(y_lo))
    f_hi = float(soliton_f(y_hi))
    out = np.empty_like(targets)
    pin_lo = targets >= f_lo
    pin_hi = targets <= f_hi
    out[pin_lo] = Y_MIN
    out[pin_hi] = 0.0
    mid = ~(pin_lo | pin_hi)
    if mid.any():
        t = targets[mid]
        lo = np.full(t.shape, y_lo)
        hi = np.full(t.shape, y_hi)
        # f decreasing: f(m) > target means the root lies right of m
        for _ in range(60):
            m = 0.5 * (lo + hi)
            go_right = soliton_f(m) > t
            lo = np.where(go_right, m, lo)
            hi = np.where(go_right, hi, m)
        out[mid] = 0.5 * (lo + hi)
    return out


def sonic_profile(z_samples, z0: float, lam: float) -> SolitonProfile:
    """Rightward front moving at exactly the sound speed u = c."""
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    z = np.asarray(z_samples, dtype=float)
    targets = (np.sqrt(2.0) * lam / (3.0 * XI)) * (z0 - z)
    y = _sonic_y_from_targets(targets)
    v = C * y
    rho = RHO0 * (1.0 + y - 0.5 * y * y)
    return SolitonProfile(u=C, z=z, v=v, rho=rho, lam=lam, z0=z0,
                          branch=SpeedClass.VALID_V_NEGATIVE)


# ---------------------------------------------------------------------------
# General front speed u
# ---------------------------------------------------------------------------

def _dz_dv_zeros(u: float):
    """Velocities where dz/dv vanishes (roots of the quadratic prefactor
    of dv/dz in the traveling-front ODE)."""
    q = np.sqrt((u * u + 2.0 * C2) / 3.0)
    return u - q, u + q


def classify_speed(u: float) -> SpeedClass:
    """Decide whether a single-valued front exists at speed u and on which
    velocity-sign branch, by checking that no zero of dz/dv falls strictly
    inside the admissible velocity interval (which would fold z(v))."""
    s = np.sqrt(u * u + 2.0 * C2)
    v_lo, v_hi = u - s, u + s  # rho = 0 endpoints
    r_minus, r_plus = _dz_dv_zeros(u)
    eps = 1e-12 * C

    def fold_free(lo, hi):
        return not any(lo + eps < r < hi - eps for r in (r_minus, r_plus))

    if u > 0 and fold_free(v_lo, -eps):
        return SpeedClass.VALID_V_NEGATIVE
    if u < 0 and fold_free(eps, v_hi):
        return SpeedClass.VALID_V_POSITIVE
    return SpeedClass.INVALID


def _z_of_v(v: np.ndarray, u: float, z0: float, lam: float,
            delta_lo: np.ndarray | None = None) -> np.ndarray:
    """Explicit z(v) along the front. Near the rho = 0 endpoint u - s the
    log argument v - (u - s) suffers catastrophic cancellation, so callers
    tabulating that end pass the exact offset delta_lo = v - (u - s)."""
    s = np.sqrt(u * u + 2.0 * C2)
    off = delta_lo if delta_lo is not None else np.abs(v - u + s)
    g = (
        (1.0 - u * u / C2) / v
        - (2.0 + u * u / C2) * (u / C2) * np.log(np.abs(v))
        - (s / (u + s) ** 2) * np.log(np.abs(v - u - s))
        + (s / (u - s) ** 2) * np.log(off)
    )
    return z0 + (XI * C / (np.sqrt(2.0) * lam)) * g


def _dz_dv(v: np.ndarray, u: float, lam: float) -> np.ndarray:
    num = 1.0 - u * u / C2 + 3.0 * u * v / C2 - 1.5 * v * v / C2
    den = v * v + u * v**3 / C2 - v**4 / (2.0 * C2)
    return -(XI * C / (np.sqrt(2.0) * lam)) * num / den


def _rho_of_v(v: np.ndarray, u: float) -> np.ndarray:
    return RHO0 * (1.0 + u * v / C2 - v * v / (2.0 * C2))


def general_profile(u: float, z_samples, z0: float, lam: float) -> SolitonProfile:
    """Front at any valid speed |u| >= c, via the explicit z(v) relation:
    a dense monotone table over the valid branch is inverted by
    interpolation, then polished with vectorized Newton steps using the
    analytic dz/dv."""
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    branch = classify_speed(u)
    if branch is SpeedClass.INVALID:
        raise InvalidSpeedError(
            f"u = {u:g} admits no single-valued front: solutions exist only for |u| >= c = {C:g}")
    z = np.asarray(z_samples, dtype=float)

    if u < 0:
        # mirror of the positive-speed front: v -> -v, z -> -z
        mirrored = general_profile(-u, -z[::-1], -z0, lam)
        return SolitonProfile(u=u, z=z, v=-mirrored.v[::-1], rho=mirrored.rho[::-1],
                              lam=lam, z0=z0, branch=branch)

    s = np.sqrt(u * u + 2.0 * C2)
    v_lo = u - s  # rho = 0 endpoint, z -> -inf
    # approach the endpoints geometrically until the z table covers the
    # requested range (z diverges logarithmically at both ends)
    d_lo = -v_lo * 1e-3
    while (_z_of_v(np.array([v_lo + d_lo]), u, z0, lam,
                   delta_lo=np.array([d_lo]))[0] > z.min() - 1.0 and d_lo > 1e-280):
        d_lo *= 0.1
    d_hi = -v_lo * 1e-3
    while _z_of_v(np.array([-d_hi]), u, z0, lam)[0] < z.max() + 1.0 and d_hi > 1e-280:
        d_hi *= 0.1

    # offsets from the rho = 0 endpoint are kept exact to dodge the
    # cancellation in v - (u - s)
    delta_lo = d_lo * np.logspace(0.0, np.log10(-0.25 * v_lo / d_lo), 200)
    z_lo = _z_of_v(v_lo + delta_lo, u, z0, lam, delta_lo=delta_lo)[:-1]
    v_ladder_lo = (v_lo + delta_lo)[:-1]
    middle = np.linspace(0.75 * v_lo, 0.25 * v_lo, 400)
    z_mid = _z_of_v(middle, u, z0, lam)
    v_ladder_hi = -(d_hi * np.logspace(0.0, np.log10(-0.25 * v_lo / d_hi), 200))[::-1][1:]
    z_hi = _z_of_v(v_ladder_hi, u, z0, lam)
    v_tab = np.concatenate([v_ladder_lo, middle, v_ladder_hi])
    z_tab = np.concatenate([z_lo, z_mid, z_hi])
    keep = np.concatenate([[True], np.diff(v_tab) > 0])  # drop rounding dups
    v_tab, z_tab = v_tab[keep], z_tab[keep]
    if np.any(np.diff(z_tab) <= 0):
        raise InvalidSpeedError(f"z(v) is not single-valued over the requested range at u = {u:g}")

    v = np.interp(z, z_tab, v_tab)
    # Newton polish; exact z(v) and dz/dv are cheap, and the branch has no
    # interior critical points for valid u
    for _ in range(4):
        resid = _z_of_v(v, u, z0, lam) - z
        v = v - resid / _dz_dv(v, u, lam)
        v = np.clip(v, v_tab[0], v_tab[-1])
    v[z <= z_tab[0]] = v_tab[0]
    v[z >= z_tab[-1]] = v_tab[-1]
    return SolitonProfile(u=u, z=z, v=v, rho=_rho_of_v(v, u), lam=lam, z0=z0, branch=branch)


# ---------------------------------------------------------------------------
# Residual verification against the hydrodynamic equations
# ---------------------------------------------------------------------------

def _dv_dz_analytic(v: np.ndarray, u: float, lam: float) -> np.ndarray:
    num = v * v + u * v**3 / C2 - v**4 / (2.0 * C2)
    den = 1.0 - u * u / C2 + 3.0 * u * v / C2 - 1.5 * v * v / C2
    out = np.zeros_like(v)
    interior = num != 0.0
    out[interior] = -(np.sqrt(2.0) * lam / (XI * C)) * num[interior] / den[interior]
    return out


def _fourth_order_gradient(f: np.ndarray, h: float) -> np.ndarray:
    """Interior 4th-order central differences; edges fall back to np.gradient."""
    g = np.gradient(f, h)
    g[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    return g


def hydro_residual(profile: SolitonProfile) -> tuple[float, float]:
    """Max-norm residuals of the continuity and Euler equations under the
    traveling ansatz (dt -> -u d/dz), over the interior samples.

    dv/dz comes from the analytic traveling-front ODE where the sampled
    velocities are admissible, otherwise from finite differences; drho/dz
    always from finite differences so that corrupted density samples are
    caught.
    """
    z, v, rho, u, lam = profile.z, profile.v, profile.rho, profile.u, profile.lam
    if z.size < 7:
        raise ValueError("need at least 7 samples for interior residuals")
    h = np.diff(z)
    if not np.allclose(h, h[0], rtol=1e-8, atol=0.0):
        raise ValueError("profile must be sampled on a uniform z grid")
    h = float(h[0])
    if h > 0.05 * XI / lam * (1.0 + 1e-9):
        raise ValueError(f"z spacing {h:g} too coarse; need <= {0.05 * XI / lam:g}")

    s = np.sqrt(u * u + 2.0 * C2)
    admissible = (v >= u - s) & (v <= u + s)
    if admissible.all():
        dv = _dv_dz_analytic(v, u, lam)
    else:
        dv = _fourth_order_gradient(v, h)
    drho = _fourth_order_gradient(rho, h)

    r_cont = (v - u) * drho + rho * dv + (np.sqrt(2.0) * lam / (XI * C)) * rho * v * v
    r_euler = (v - u) * dv + (C2 / RHO0) * drho
    sl = slice(2, -2)
    return float(np.max(np.abs(r_cont[sl]))), float(np.max(np.abs(r_euler[sl])))


# ---------------------------------------------------------------------------
# Fitting a GP front to the sonic profile
# ---------------------------------------------------------------------------

def _y_from_rho(rho):
    """Invert rho/rho0 = 1 + y - y^2/2 on the sonic branch y in (1-sqrt3, 0)."""
    return 1.0 - np.sqrt(3.0 - 2.0 * np.asarray(rho) / RHO0)


def fit_front(grid: Grid1D, rho: np.ndarray, lam: float) -> tuple[float, float]:
    """Center the sonic profile on a density snapshot's rightmost rho0/2
    crossing and report (z0, max |rho_snapshot - rho_profile|) over the
    window where the profile density lies in [0.05, 0.95] rho0.

    The crossing is interpolated in f-space, where the exact profile is
    linear in z, so feeding a sonic profile back in recovers z0 to
    inversion accuracy.
    """
    x = grid.x
    xc = rightmost_half_crossing(x, rho)
    if xc is None:
        raise FrontNotFoundError("no rho0/2 crossing in snapshot")
    j = int(np.searchsorted(x, xc))  # x[j-1] <= xc < x[j]
    f_half = float(soliton_f(1.0 - np.sqrt(2.0)))
    lo, hi = rho[j - 1], rho[j]
    if 0.0 < lo < RHO0 and 0.0 < hi < RHO0:
        f0 = float(soliton_f(_y_from_rho(lo)))
        f1 = float(soliton_f(_y_from_rho(hi)))
        xc = float(x[j - 1] + (f_half - f0) / (f1 - f0) * grid.dx)
    z0 = xc + (3.0 * XI / (np.sqrt(2.0) * lam)) * f_half

    scale = 3.0 * XI / (np.sqrt(2.0) * lam)
    z_at = lambda frac: z0 - scale * float(soliton_f(_y_from_rho(frac)))
    z_lo, z_hi = z_at(0.05), z_at(0.95)
    window = (x >= z_lo) & (x <= z_hi)
    if not window.any():
        raise FrontNotFoundError("fit window contains no samples")
    prof = sonic_profile(x[window], z0, lam)
    mismatch = float(np.max(np.abs(rho[window] - prof.rho)))
    return z0, mismatch
