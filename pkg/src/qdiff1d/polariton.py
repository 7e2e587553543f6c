"""Microscopic-to-effective parameter mapping for dark-state Rydberg
polaritons, and the two-body scattering calculation that locates the
lossless interaction point.

Under EIT (g much larger than |Delta|, Omega, gamma) the dark-state
branch carries an effective complex mass

    m = -g^4 / (2 Delta c^2 Omega^2),   Delta = delta + i gamma,

which reproduces the k^2 one-body loss with strength lam = gamma/|delta|
for red detuning. Van der Waals interactions saturate inside the
blockade radius r_b = |C6 chi|^(1/6), giving the effective two-body
potential

    U(r) = (1/chi) / (sigma r^6 / r_b^6 - 1),  sigma = |chi C6|/(chi C6).

The contact-interaction strength is -1/(m a) with a the zero-energy
scattering length, computed two ways: a square-well approximation whose
depth matches -integral(m U dr), and a full numerical solution of the
zero-energy radial equation psi'' = m U(r) psi with the even-channel
boundary condition. Both use the same reduced-mass normalization, so the
two are comparable by construction; they agree at small kappa*r_b
(kappa = g^2 / (c |Delta|)) while the lossless point Im(1/ma) = 0 sits
beyond the square-well regime and needs the numerical solution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

EIT_RATIO = 10.0


class DegenerateParamsError(ValueError):
    """Parameter combination with chi = 0 (no blockade scale)."""


class FreeParticleError(RuntimeError):
    """Zero potential: the scattering length diverges."""


class AsymptoticsError(RuntimeError):
    """Wavefunction not yet linear at r_max; increase the fit range."""


@dataclass(frozen=True)
class PolaritonParams:
    g: float        # atom-photon coupling
    c_light: float  # photon group velocity in the medium
    delta: float    # real detuning from the p state
    gamma: float    # p-state half-linewidth
    Omega: float    # half the control Rabi frequency
    C6: float       # van der Waals coefficient (sign matters)

    def __post_init__(self):
        if self.g <= 0 or self.Omega <= 0 or self.c_light <= 0:
            raise ValueError("g, Omega, c_light must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        scale = max(abs(self.Delta), self.Omega, self.gamma)
        if self.g < EIT_RATIO * scale:
            warnings.warn(
                f"g/max(|Delta|, Omega, gamma) = {self.g / scale:.2f} < {EIT_RATIO}: "
                "outside the dark-state (EIT) regime the reduction assumes",
                stacklevel=2,
            )

    @property
    def Delta(self) -> complex:
        return self.delta + 1j * self.gamma

    @property
    def kappa(self) -> float:
        return self.g**2 / (self.c_light * abs(self.Delta))


def effective_mass(p: PolaritonParams) -> complex:
    return -p.g**4 / (2.0 * p.Delta * p.c_light**2 * p.Omega**2)


def one_body_lambda(delta: float, gamma: float) -> float:
    """k^2 loss strength of the dark-state branch, valid for red detuning."""
    if delta >= 0:
        raise ValueError(f"one-body loss strength requires delta < 0, got {delta}")
    return gamma / abs(delta)


def chi_and_blockade(p: PolaritonParams) -> tuple[complex, float]:
    if p.C6 == 0:
        raise ValueError("C6 must be nonzero")
    chi = 1.0 / (2.0 * p.Delta) - p.Delta / (2.0 * p.Omega**2)
    if chi == 0:
        raise DegenerateParamsError("chi = 0 (Delta^2 = Omega^2): no blockade radius")
    r_b = float(abs(p.C6 * chi) ** (1.0 / 6.0))
    return chi, r_b


def effective_potential(r, p: PolaritonParams) -> np.ndarray:
    """Blockaded interaction: saturates at -1/chi for r << r_b and decays
    as r^-6 outside."""
    chi, r_b = chi_and_blockade(p)
    sigma = abs(chi * p.C6) / (chi * p.C6)
    r = np.asarray(r, dtype=float)
    return (1.0 / chi) / (sigma * (r / r_b) ** 6 - 1.0)


def square_well_strength(p: PolaritonParams) -> complex:
    """Closed form for u0^2 r_b = -integral_0^inf m U(r) dr.

    With s = r/r_b the integral reduces to int ds/(sigma s^6 - 1), which a
    rotation of the contour onto the roots of sigma s^6 = -1 evaluates to
    (pi/3) sigma^-1 (-sigma^-1)^(-5/6), principal branches throughout
    (sigma is unimodular and off the positive real axis whenever chi*C6
    has an imaginary part).
    """
    m = effective_mass(p)
    chi, r_b = chi_and_blockade(p)
    sigma_inv = chi * p.C6 / abs(chi * p.C6)
    integral = (np.pi / 3.0) * sigma_inv * (-sigma_inv) ** (-5.0 / 6.0)
    return -m * (r_b / chi) * integral


def square_well_strength_quadrature(p: PolaritonParams) -> complex:
    """-integral_0^inf m U(r) dr by adaptive quadrature; the independent
    oracle for square_well_strength."""
    m = effective_mass(p)
    chi, r_b = chi_and_blockade(p)
    sigma = abs(chi * p.C6) / (chi * p.C6)

    def integrand(s: float) -> complex:
        return 1.0 / (sigma * s**6 - 1.0)

    def piece(lo, hi, part):
        val, _ = quad(lambda s: part(integrand(s)), lo, hi, epsabs=1e-13,
                      epsrel=1e-11, limit=400)
        return val

    total = 0.0 + 0.0j
    for lo, hi in ((0.0, 0.5), (0.5, 1.5), (1.5, np.inf)):
        total += piece(lo, hi, np.real) + 1j * piece(lo, hi, np.imag)
    return -m * (r_b / chi) * total


def scattering_length_square_well(u0_sq_rb: complex, r_b: float) -> complex:
    """a = r_b + 1/(u0 tan(u0 r_b)) for a well of depth u0^2 and width r_b.

    At a pole of tan the cotangent term vanishes, so a -> r_b in the
    limiting sense.
    """
    if u0_sq_rb == 0:
        raise ValueError("u0 must be nonzero")
    u0 = np.sqrt(complex(u0_sq_rb) / r_b)
    t = np.tan(u0 * r_b)
    if t == 0:
        return complex(r_b + np.inf)
    if np.isinf(t.real) or np.isinf(t.imag):
        return complex(r_b)
    return r_b + 1.0 / (u0 * t)


def _integrate_radial(strength: complex, sigma: complex, rho_max: float,
                      rtol: float) -> tuple[np.ndarray, np.ndarray]:
    """Zero-energy radial equation in blockade units rho = r/r_b:

        psi'' = strength / (sigma rho^6 - 1) * psi,  strength = m r_b^2 / chi,

    from the exact even-channel condition (psi, psi') = (1, 0) at rho = 0
    (the potential saturates to a finite -1/chi there, so the origin is
    regular; starting at finite rho with psi' = 0 instead would bias the
    weak-well scattering length at the 1e-3 level). Returns samples over
    the outer fifth [0.8, 1.0] rho_max for the linear-asymptote fit."""

    def rhs(rho, y):
        psi, dpsi = y
        return [dpsi, strength / (sigma * rho**6 - 1.0) * psi]

    fit_lo = 0.8 * rho_max
    rho_fit = np.linspace(fit_lo, rho_max, 41)
    sol = solve_ivp(rhs, (0.0, rho_max), [1.0 + 0.0j, 0.0 + 0.0j],
                    method="DOP853", rtol=rtol, atol=rtol, t_eval=rho_fit)
    if not sol.success:
        raise RuntimeError(f"radial integration failed: {sol.message}")
    return rho_fit, sol.y[0]


def scattering_length_numeric(p: PolaritonParams, r_max_factor: float = 150.0,
                              rtol: float = 1e-10,
                              fit_residual_tol: float = 1e-4) -> complex:
    """Zero-energy scattering length from the full potential: integrate
    psi'' = m U psi outward from the origin with even-channel data
    psi = 1, psi' = 0, then fit psi ~ (r - a) over [0.8, 1.0] r_max."""
    if p.C6 == 0:
        raise FreeParticleError("zero potential: psi stays constant and a diverges")
    if r_max_factor < 10.0:
        raise ValueError("need r_max >= 10 r_b for the asymptotic fit")
    m = effective_mass(p)
    chi, r_b = chi_and_blockade(p)
    sigma = abs(chi * p.C6) / (chi * p.C6)
    strength = m * r_b**2 / chi

    rho, psi = _integrate_radial(strength, sigma, r_max_factor, rtol)
    # complex least squares for psi = b0 + b1 rho
    design = np.column_stack([np.ones_like(rho), rho]).astype(complex)
    coeffs, *_ = np.linalg.lstsq(design, psi, rcond=None)
    b0, b1 = coeffs
    resid = np.max(np.abs(psi - design @ coeffs)) / np.max(np.abs(psi))
    if resid > fit_residual_tol:
        raise AsymptoticsError(
            f"linear-fit residual {resid:.2e} > {fit_residual_tol:g}; increase r_max_factor")
    if abs(b1) * r_max_factor < 1e-12 * abs(b0):
        raise FreeParticleError("fitted slope is zero: scattering length diverges")
    return complex(-b0 / b1 * r_b)


def interaction_strength(m: complex, a: complex) -> complex:
    """Contact-interaction strength -1/(m a); lossless when its imaginary
    part vanishes."""
    return -1.0 / (m * a)


@dataclass
class EffectiveParams:
    mass: complex
    chi: complex
    r_b: float
    kappa: float
    u0_sq_rb: complex
    a_sq: complex
    a_num: complex | None
    interaction_sq: complex
    interaction_num: complex | None


def effective_params(p: PolaritonParams, numeric: bool = True,
                     r_max_factor: float = 150.0) -> EffectiveParams:
    m = effective_mass(p)
    chi, r_b = chi_and_blockade(p)
    u0_sq_rb = square_well_strength(p)
    a_sq = scattering_length_square_well(u0_sq_rb, r_b)
    a_num = scattering_length_numeric(p, r_max_factor=r_max_factor) if numeric else None
    return EffectiveParams(
        mass=m, chi=chi, r_b=r_b, kappa=p.kappa, u0_sq_rb=u0_sq_rb,
        a_sq=a_sq, a_num=a_num,
        interaction_sq=interaction_strength(m, a_sq),
        interaction_num=interaction_strength(m, a_num) if a_num is not None else None,
    )


def params_at_kappa_rb(p_template: PolaritonParams, kappa_rb: float) -> PolaritonParams:
    """Rescale C6 (sign preserved) so that kappa * r_b matches the target,
    keeping g, c, delta, gamma, Omega fixed."""
    if kappa_rb <= 0:
        raise ValueError("kappa_rb must be positive")
    chi = 1.0 / (2.0 * p_template.Delta) - p_template.Delta / (2.0 * p_template.Omega**2)
    if chi == 0:
        raise DegenerateParamsError("chi = 0: kappa_rb cannot be tuned via C6")
    c6_mag = (kappa_rb / p_template.kappa) ** 6 / abs(chi)
    sign = 1.0 if p_template.C6 >= 0 else -1.0
    return PolaritonParams(g=p_template.g, c_light=p_template.c_light,
                           delta=p_template.delta, gamma=p_template.gamma,
                           Omega=p_template.Omega, C6=sign * c6_mag)


def find_lossless_point(p_template: PolaritonParams, scan_lo: float, scan_hi: float,
                        im_tol: float = 1e-4, r_max_factor: float = 150.0,
                        max_iter: int = 80) -> float:
    """Bisect kappa*r_b (via C6 scaling) to the zero of Im(-1/(m a_num)).

    Stops once |Im(1/ma)| < im_tol * |Re(1/ma)|. Raises if the bracket
    does not contain a sign change.
    """
    m = effective_mass(p_template)

    def im_strength(kappa_rb: float) -> tuple[float, float]:
        a = scattering_length_numeric(params_at_kappa_rb(p_template, kappa_rb),
                                      r_max_factor=r_max_factor)
        s = interaction_strength(m, a)
        return s.imag, abs(s.real)

    f_lo, _ = im_strength(scan_lo)
    f_hi, _ = im_strength(scan_hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError(
            f"no sign change of Im(-1/ma) in [{scan_lo:g}, {scan_hi:g}] "
            f"(endpoints {f_lo:.3e}, {f_hi:.3e})")
    lo, hi = scan_lo, scan_hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid, re_mid = im_strength(mid)
        if abs(f_mid) < im_tol * re_mid:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise RuntimeError("bisection did not reach the Im(1/ma) tolerance")
