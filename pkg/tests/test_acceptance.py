"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line with the measured numbers at the stated tolerances.

The heavy runs (scaling sweep, GP/KPZ comparison) execute once as
session fixtures through the CLI, so this module also exercises the
end-to-end command surface. Expected wall time is tens of minutes,
dominated by the criterion-3 sweep.
"""

import csv
import json
import os
import warnings
from collections import defaultdict

import numpy as np
import pytest

from qdiff1d import polariton as pol
from qdiff1d.cli import main
from qdiff1d.fields import GpState, SOUND_SPEED, make_grid
from qdiff1d.gp import (
    GaussianBump,
    GpConfig,
    detect_singularity_time,
    measure_front_speed,
    run_gp,
    step_gp,
)
from qdiff1d.kpz import (
    ParabolaCoeffs,
    causality_radius_check,
    parabola_blowup_time,
    parabola_escape_time,
    toy_wave_exact,
    toy_wave_numeric,
)
from qdiff1d.soliton import (
    SpeedClass,
    classify_speed,
    hydro_residual,
    sonic_profile,
)

C = SOUND_SPEED


def report(num, name, ok, detail):
    print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'} {name}: {detail}", flush=True)
    return ok


# ---------------------------------------------------------------------------
# shared heavy runs
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def fig1_traj():
    grid = make_grid(1000, 0.2)
    cfg = GpConfig(grid=grid, lam=2.0, dt=0.1, t_max=400.0,
                   ic=GaussianBump(0.1, 15.0), snapshot_every=2.0)
    return run_gp(cfg)


@pytest.fixture(scope="session")
def compare_out(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("acc") / "compare")
    code = main(["compare", "--lambda", "0.4", "--h", "0.05", "--w", "200",
                 "--dx", "0.2", "--dt", "0.1", "--length", "6000",
                 "--tmax", "800", "--out", out])
    assert code == 0
    return out


@pytest.fixture(scope="session")
def sweep_out(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("acc") / "sweep")
    code = main(["sweep",
                 "--lambdas", "0.05,0.1,0.15,0.2,0.25,0.3",
                 "--heights", "0.25,0.2,0.25",
                 "--widths", "10,15,40",
                 "--pair-mode", "zip",
                 "--length", "10000", "--dx", "0.2", "--dt", "0.1",
                 "--tmax", "2600", "--workers", "2", "--out", out])
    return out, code


# ---------------------------------------------------------------------------
# 1. linear loss law (exact oracle)
# ---------------------------------------------------------------------------

def test_criterion_1_linear_loss_law():
    # unit-amplitude random-phase spectrum, and a step size for which even
    # the fastest-decaying mode stays far above machine precision, so the
    # per-mode relative error is meaningful for every k
    grid = make_grid(64, 0.5)
    lam = 0.3
    cfg = GpConfig(grid=grid, lam=lam, dt=1e-3, t_max=1.0, nonlinearity_on=False)
    rng = np.random.default_rng(5)
    phases = np.exp(2j * np.pi * rng.random(grid.n_points))
    psi0 = np.fft.ifft(phases)
    state = GpState(grid, psi0.copy())
    for _ in range(1000):
        state = step_gp(state, cfg)
    amps = np.abs(np.fft.fft(state.psi))
    expected = np.exp(-lam * grid.k**2 * state.t / 2)
    rel = np.max(np.abs(amps - expected) / expected)
    ok = report(1, "linear loss law", rel < 1e-8,
                f"max per-mode relative error {rel:.2e} after 1000 steps (tol 1e-8)")
    assert ok


# ---------------------------------------------------------------------------
# 2. Fig. 1 phenomenology
# ---------------------------------------------------------------------------

def test_criterion_2_fig1_phenomenology(fig1_traj):
    traj = fig1_traj
    tau_sing = detect_singularity_time(traj)
    series = traj.min_density_series
    half = series[series[:, 0] <= tau_sing / 2]
    transient_ok = tau_sing is not None and tau_sing > 20.0 and half[:, 1].min() > 0.8
    speed = measure_front_speed(traj)
    speed_ok = abs(speed - np.sqrt(2)) / np.sqrt(2) <= 0.10
    ok = report(2, "Fig. 1 phenomenology", transient_ok and speed_ok,
                f"tau_sing={tau_sing:.1f} (finite, delayed: ok={transient_ok}), "
                f"front speed={speed:.4f} vs sqrt(2)={np.sqrt(2):.4f} +-10% "
                f"(ok={speed_ok}; measured steady and resolution-converged, "
                f"see decisions ledger)")
    assert ok


# ---------------------------------------------------------------------------
# 3. Fig. 2 scaling collapse
# ---------------------------------------------------------------------------

def test_criterion_3_scaling_collapse(sweep_out):
    out, code = sweep_out
    summary = json.load(open(os.path.join(out, "summary.json")))
    rows = list(csv.DictReader(open(os.path.join(out, "collapse.csv"))))
    slope = summary["slope"]
    slope_ok = slope is not None and -2.3 <= slope <= -1.7

    groups = defaultdict(list)
    for r in rows:
        if r["y"]:
            groups[round(float(r["z"]), 12)].append(float(r["y"]))
    spreads = {z: (max(ys) - min(ys)) / np.mean(ys)
               for z, ys in groups.items() if len(ys) > 1}
    spread_ok = bool(spreads) and max(spreads.values()) < 0.25
    exit_ok = code == 0 and summary["n_ok"] >= 0.8 * summary["n_runs"]
    ok = report(3, "Fig. 2 scaling collapse", slope_ok and spread_ok and exit_ok,
                f"log-log slope={slope:.3f} (want -2 +- 0.3), "
                f"max y-spread at fixed z={max(spreads.values()):.1%} (want < 25%), "
                f"{summary['n_ok']}/{summary['n_runs']} runs ok, exit={code}")
    assert ok


# ---------------------------------------------------------------------------
# 4. GP-KPZ coincidence (Fig. 3)
# ---------------------------------------------------------------------------

def test_criterion_4_gp_kpz_coincidence(compare_out):
    summary = json.load(open(os.path.join(compare_out, "summary.json")))
    tau_sing = summary["tau_sing"]
    t_blow = summary["kpz_blowup_time"]
    timing_ok = (tau_sing is not None and t_blow is not None
                 and abs(t_blow - tau_sing) <= 0.1 * tau_sing)
    linf = summary["max_linf_while_small"]
    linf_ok = linf is not None and linf < 0.01
    ok = report(4, "GP-KPZ coincidence", timing_ok and linf_ok,
                f"|t_blowup-tau_sing|={abs(t_blow - tau_sing):.1f} "
                f"vs 0.1*tau_sing={0.1 * tau_sing:.1f} (ok={timing_ok}); "
                f"max Linf while dev<0.2 = {linf:.4f} (want < 0.01, ok={linf_ok}; "
                f"the model difference scales as ~3.3*dev^2, see decisions ledger)")
    assert ok


# ---------------------------------------------------------------------------
# 5. blow-up oracles
# ---------------------------------------------------------------------------

def test_criterion_5_blowup_oracles():
    # (a) toy equation numeric vs exact, and the analytic blow-up time
    grid = make_grid(60, 0.05)
    lam = 0.5
    theta0 = 0.3 * np.exp(-((grid.x / 3.0) ** 2))
    num = toy_wave_numeric(grid, theta0, dt=grid.dx, t=3.0, lam=lam)
    exact = toy_wave_exact(grid, theta0, t=3.0, lam=lam)
    toy_linf = float(np.max(np.abs(num - exact)))
    dt = grid.dx
    th, t = theta0.copy(), 0.0
    while np.max(th) < 1e6 and t < 10.0:
        th = toy_wave_numeric(grid, th, dt, dt, lam)
        t += dt
    t_star = 1.0 / (lam * theta0.max())
    toy_ok = toy_linf < 1e-4 and abs(t - t_star) <= 2 * dt

    # (b) parabolic family: ODE escape vs quadrature
    coeffs = ParabolaCoeffs(a=1.0)
    t_quad = parabola_blowup_time(coeffs, 1.0)
    t_ode = parabola_escape_time(coeffs, 1.0, a_stop=1e7)
    par_rel = abs(t_quad - t_ode) / t_ode
    par_ok = par_rel < 1e-3

    # (c) light cone
    grid_c = make_grid(120, 0.1)
    r0 = 6.0
    x = grid_c.x
    bump = np.zeros_like(x)
    inside = np.abs(x) < r0
    bump[inside] = 1e-5 * np.exp(-x[inside] ** 2 / (r0**2 - x[inside] ** 2))
    bg = 0.1 * np.sin(2 * np.pi * x / grid_c.length)
    zeros = np.zeros_like(x)
    cone_ok = True
    worst = -np.inf
    for t_c in (4.0, 8.0, 12.0):
        radius = causality_radius_check(grid_c, (zeros, bg + bump), (zeros, bg),
                                        r0=r0, t=t_c, lam=0.5)
        worst = max(worst, radius - C * t_c)
        cone_ok &= radius <= C * t_c + 3 * grid_c.dx

    ok = report(5, "blow-up oracles", toy_ok and par_ok and cone_ok,
                f"toy Linf={toy_linf:.1e} (tol 1e-4), blow-up time err "
                f"{abs(t - t_star):.3f} (tol {2 * dt}); parabola ODE-vs-quadrature "
                f"rel={par_rel:.1e} (tol 1e-3); cone excess={worst:.3f} "
                f"(budget {3 * grid_c.dx:.1f})")
    assert ok


# ---------------------------------------------------------------------------
# 6. soliton exactness
# ---------------------------------------------------------------------------

def test_criterion_6_soliton_exactness():
    lam = 0.4
    z = np.arange(-40.0, 40.0, 0.04 / lam)
    prof = sonic_profile(z, 0.0, lam)
    r_cont, r_euler = hydro_residual(prof)
    resid_ok = max(r_cont, r_euler) < 1e-6

    ends = sonic_profile(np.array([-1e9, 1e9]), 0.0, lam)
    ends_ok = abs(ends.rho[0]) < 1e-8 and abs(ends.rho[1] - 1.0) < 1e-8

    widths = {}
    for la in (0.1, 0.2, 0.4, 0.8):
        zz = np.linspace(-60 / la, 60 / la, 30001)
        p = sonic_profile(zz, 0.0, la)
        widths[la] = np.interp(0.9, p.rho, p.z) - np.interp(0.1, p.rho, p.z)
    prods = [la * w for la, w in widths.items()]
    width_ok = max(prods) / min(prods) - 1 < 0.02

    cls_ok = (classify_speed(C / 2) is SpeedClass.INVALID
              and classify_speed(C) is SpeedClass.VALID_V_NEGATIVE
              and classify_speed(-C) is SpeedClass.VALID_V_POSITIVE)

    ok = report(6, "soliton exactness", resid_ok and ends_ok and width_ok and cls_ok,
                f"residuals=({r_cont:.1e}, {r_euler:.1e}) (tol 1e-6); endpoint "
                f"densities ok={ends_ok}; width*lambda spread="
                f"{max(prods) / min(prods) - 1:.2%} (tol 2%); speed classes ok={cls_ok}")
    assert ok


# ---------------------------------------------------------------------------
# 7. front-to-soliton fit (reuses criterion 4's run)
# ---------------------------------------------------------------------------

def test_criterion_7_front_fit(compare_out):
    summary = json.load(open(os.path.join(compare_out, "summary.json")))
    fit = summary["soliton_fit"]
    ok = report(7, "front-to-soliton fit",
                fit["mismatch"] is not None and fit["mismatch"] < 0.05,
                f"Linf mismatch={fit['mismatch']:.4f} over the [0.05, 0.95] window "
                f"at t={fit.get('t_snapshot'):.0f} (tol 0.05)")
    assert ok


# ---------------------------------------------------------------------------
# 8. polariton scattering
# ---------------------------------------------------------------------------

def fig4_template():
    gamma, delta = 1.0, -10.0
    Omega = 6.0 * abs(delta + 1j * gamma)
    g = 12.0 * max(Omega, abs(delta + 1j * gamma), gamma)
    return pol.PolaritonParams(g=g, c_light=1.0, delta=delta, gamma=gamma,
                               Omega=Omega, C6=1e-20)


def test_criterion_8_polariton_scattering():
    rng = np.random.default_rng(7)
    worst_quad = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(10):
            delta = rng.uniform(-20, 20)
            gamma = rng.uniform(0.1, 5)
            Omega = rng.uniform(0.5, 8) * abs(delta + 1j * gamma)
            g = 15 * max(Omega, abs(delta + 1j * gamma), gamma)
            C6 = rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-22, -16)
            p = pol.PolaritonParams(g=g, c_light=1.0, delta=delta, gamma=gamma,
                                    Omega=Omega, C6=C6)
            cf = pol.square_well_strength(p)
            qd = pol.square_well_strength_quadrature(p)
            worst_quad = max(worst_quad, abs(cf - qd) / abs(qd))
    quad_ok = worst_quad < 1e-6

    tmpl = fig4_template()
    m = pol.effective_mass(tmpl)
    rels = []
    for krb in (1.0, 0.5, 0.25):
        p = pol.params_at_kappa_rb(tmpl, krb)
        _, rb = pol.chi_and_blockade(p)
        s_sq = pol.interaction_strength(
            m, pol.scattering_length_square_well(pol.square_well_strength(p), rb))
        s_num = pol.interaction_strength(m, pol.scattering_length_numeric(p))
        rels.append(abs(s_sq - s_num) / abs(s_num))
    agree_ok = all(r < 0.10 for r in rels)

    star = pol.find_lossless_point(tmpl, 3.0, 8.0)
    cross_ok = abs(star - 5.5) <= 0.5
    note = ""
    if not cross_ok:
        note = (" — outside tolerance: the reduced-mass convention of the "
                "radial equation is the documented open question and the "
                "first suspect")

    ok = report(8, "polariton scattering", quad_ok and agree_ok and cross_ok,
                f"quadrature-vs-closed-form worst rel={worst_quad:.1e} (tol 1e-6); "
                f"square-well/numeric rel at krb=1,0.5,0.25: "
                f"{', '.join(f'{r:.2%}' for r in rels)} (tol 10%); "
                f"Im(1/ma) zero-crossing at kappa*r_b={star:.3f} "
                f"(want 5.5 +- 0.5){note}")
    assert ok


# ---------------------------------------------------------------------------
# 9. conservation/monotonicity suite
# ---------------------------------------------------------------------------

def test_criterion_9_conservation_suite():
    grid = make_grid(128, 0.5)
    cfg = GpConfig(grid=grid, lam=0.5, dt=0.1, t_max=1000.0,
                   ic=GaussianBump(0.2, 5.0), snapshot_every=None)
    n = run_gp(cfg).total_number_series[:, 1]
    decay_ok = bool(np.all(np.diff(n) <= 1e-8 * n[:-1]))

    cfg0 = GpConfig(grid=grid, lam=0.0, dt=0.1, t_max=1000.0,
                    ic=GaussianBump(0.2, 5.0), snapshot_every=None)
    n0 = run_gp(cfg0).total_number_series[:, 1]
    conserve_rel = float(np.max(np.abs(n0 - n0[0])) / n0[0])
    conserve_ok = conserve_rel < 1e-8

    grid_p = make_grid(200, 0.5)
    cfg_p = GpConfig(grid=grid_p, lam=0.8, dt=0.1, t_max=30.0,
                     ic=GaussianBump(0.3, 8.0), snapshot_every=30.0)
    _, rho, _ = run_gp(cfg_p).snapshots[-1]
    mirrored = rho[(-np.arange(grid_p.n_points)) % grid_p.n_points]
    parity = float(np.max(np.abs(rho - mirrored)))
    parity_ok = parity < 1e-8

    grid_s = make_grid(64, 0.5)
    fields_out = []
    for dt in (0.2, 0.1, 0.05):
        cfg_s = GpConfig(grid=grid_s, lam=0.4, dt=dt, t_max=4.0,
                         ic=GaussianBump(0.2, 4.0), snapshot_every=None)
        state = cfg_s.initial_state()
        for _ in range(int(round(4.0 / dt))):
            state = step_gp(state, cfg_s)
        fields_out.append(np.abs(state.psi) ** 2)
    e1 = np.max(np.abs(fields_out[0] - fields_out[1]))
    e2 = np.max(np.abs(fields_out[1] - fields_out[2]))
    order = float(np.log2(e1 / e2))
    order_ok = 1.8 <= order <= 2.2

    ok = report(9, "conservation/monotonicity", decay_ok and conserve_ok
                and parity_ok and order_ok,
                f"N monotone={decay_ok}; lam=0 drift={conserve_rel:.1e} over 1e4 "
                f"steps (tol 1e-8); parity={parity:.1e} (tol 1e-8); "
                f"Strang order={order:.2f} (want [1.8, 2.2])")
    assert ok
