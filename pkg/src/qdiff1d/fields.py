"""Grids, fields, and initial conditions shared by all solvers.

Everything lives on a uniform periodic 1D grid in natural units:
healing length xi = 1, coherence time tau = 1, background density
rho0 = 1, mass m = 1, so the sound speed is c = sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

XI = 1.0
TAU = 1.0
RHO0 = 1.0
SOUND_SPEED = np.sqrt(2.0) * XI / TAU


@dataclass(frozen=True)
class NaturalUnits:
    """Unit system all solvers work in: healing length, coherence time and
    background density are 1, so the sound speed is sqrt(2)."""

    xi: float = XI
    tau: float = TAU
    rho0: float = RHO0

    @property
    def c(self) -> float:
        return np.sqrt(2.0) * self.xi / self.tau


class GridError(ValueError):
    """Invalid grid construction parameters."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid with n_points samples spaced dx apart.

    Coordinates span [-L/2, L/2) so that a perturbation placed at x = 0
    is centered, with the wrap point at the far edge.
    """

    n_points: int
    dx: float

    def __post_init__(self):
        if self.dx <= 0:
            raise GridError(f"dx must be positive, got {self.dx}")
        if self.n_points < 8:
            raise GridError(f"need at least 8 points, got {self.n_points}")
        if self.n_points % 2 != 0:
            raise GridError(f"n_points must be even, got {self.n_points}")

    @property
    def length(self) -> float:
        return self.n_points * self.dx

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dx

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


def make_grid(length: float, dx: float) -> Grid1D:
    """Build a grid covering `length` with spacing `dx`.

    length/dx must round to an even integer >= 8; the rounding absorbs
    float noise like 10000/0.2 = 49999.999...
    """
    if length <= 0 or dx <= 0:
        raise GridError(f"length and dx must be positive, got {length}, {dx}")
    n_float = length / dx
    n = int(round(n_float))
    if abs(n_float - n) > 1e-9 * max(1.0, n_float):
        raise GridError(f"length/dx = {n_float} is not an integer point count")
    if n < 8 or n % 2 != 0:
        raise GridError(f"length/dx must be an even integer >= 8, got {n}")
    return Grid1D(n_points=n, dx=dx)


@dataclass
class RealField:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("values length must match grid.n_points")


@dataclass
class ComplexField:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("values length must match grid.n_points")


@dataclass
class GpState:
    """Condensate field psi(x) plus the simulation clock."""

    grid: Grid1D
    psi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (self.grid.n_points,):
            raise ValueError("psi length must match grid.n_points")

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def phase(self) -> np.ndarray:
        return np.angle(self.psi)


def gaussian_bump_state(grid: Grid1D, h: float, w: float) -> GpState:
    """Uniform background with a Gaussian density bump of height h*rho0
    and width w, at rest (phase = 0):

        psi(x, 0) = sqrt(rho0) * (1 + h exp(-x^2/w^2))^(1/2)
    """
    if w <= 0:
        raise ValueError(f"width must be positive, got {w}")
    if h <= -1:
        raise ValueError(f"h must exceed -1 to keep the density positive, got {h}")
    rho = RHO0 * (1.0 + h * np.exp(-grid.x**2 / w**2))
    return GpState(grid=grid, psi=np.sqrt(rho).astype(complex), t=0.0)


def derivative(f, order: int = 1):
    """Second-order central finite difference with periodic wrap.

    Accepts a RealField/ComplexField (returns the same type) or a bare
    array together with grid spacing via `derivative_values`.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    vals = derivative_values(f.values, f.grid.dx, order)
    return type(f)(grid=f.grid, values=vals)


def derivative_values(v: np.ndarray, dx: float, order: int = 1) -> np.ndarray:
    if order == 1:
        return (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * dx)
    if order == 2:
        return (np.roll(v, -1) - 2.0 * v + np.roll(v, 1)) / dx**2
    raise ValueError(f"order must be 1 or 2, got {order}")


def total_number(state: GpState) -> float:
    """Total particle number N = sum |psi|^2 dx."""
    return float(np.sum(np.abs(state.psi) ** 2) * state.grid.dx)


class FrontNotFoundError(RuntimeError):
    """Density profile has no usable rho0/2 front crossing."""


def rightmost_half_crossing(x: np.ndarray, rho: np.ndarray) -> float | None:
    """Rightmost upward crossing of rho0/2 (depleted region on the left),
    linearly interpolated between samples. None if the density never dips
    below (or never returns above) half the background."""
    below = np.flatnonzero(rho < 0.5 * RHO0)
    if below.size == 0 or below.size == rho.size:
        return None
    j = int(below[-1])
    if j + 1 >= rho.size:
        return None  # front sits at the wrap point; unusable
    r0, r1 = rho[j], rho[j + 1]
    return float(x[j] + (0.5 * RHO0 - r0) / (r1 - r0) * (x[j + 1] - x[j]))
