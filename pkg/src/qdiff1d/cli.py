"""Command-line entry points and deterministic serialization.

Subcommands: gp, kpz, compare, soliton, sweep, polariton. Every command
takes --out DIR and writes CSV files (header row, comma separator, 17
significant digits so doubles round-trip exactly), a summary.json, and a
manifest.json written last (its presence signals run completion).

Exit codes: 0 success, 2 usage/parameter error, 3 numeric fault,
4 domain-validity rejection (e.g. a soliton speed with no solution).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import fields, gp, kpz, polariton, soliton
from .fields import FrontNotFoundError, GridError, RHO0, SOUND_SPEED, TAU

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_DOMAIN = 4


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:.17g}"


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


class Manifest:
    """Run record; written last so its presence signals completion."""

    def __init__(self, command: str, parameters: dict, out_dir: str):
        self.command = command
        self.parameters = parameters
        self.out_dir = out_dir
        self.outputs: list[str] = []
        self.warnings: list[str] = []
        self._t0 = time.monotonic()

    def path(self, name: str) -> str:
        p = os.path.join(self.out_dir, name)
        self.outputs.append(p)
        return p

    def write(self) -> None:
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "outputs": sorted(self.outputs),
            "wall_time": time.monotonic() - self._t0,
            "warnings": self.warnings,
        }
        write_json(os.path.join(self.out_dir, "manifest.json"), payload)


def _start(args, command: str, skip=("func", "out")) -> Manifest:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    os.makedirs(args.out, exist_ok=True)
    return Manifest(command, params, args.out)


# ---------------------------------------------------------------------------
# gp
# ---------------------------------------------------------------------------

def cmd_gp(args) -> int:
    man = _start(args, "gp")
    grid = fields.make_grid(args.length, args.dx)
    cfg = gp.GpConfig(grid=grid, lam=args.lam, dt=args.dt, t_max=args.tmax,
                      snapshot_every=args.snapshot_every,
                      ic=gp.GaussianBump(args.h, args.w))
    traj = gp.run_gp(cfg)
    man.warnings.extend(traj.warnings)

    x = grid.x
    with open(man.path("density.csv"), "w", newline="") as fh:
        fh.write("t,x,rho,theta\n")
        for t, rho, theta in traj.snapshots:
            ts = _fmt(t)
            for xi_, r, th in zip(x, rho, theta):
                fh.write(f"{ts},{_fmt(xi_)},{_fmt(r)},{_fmt(th)}\n")

    tau_sing = gp.detect_singularity_time(traj, args.threshold)
    try:
        front_speed = gp.measure_front_speed(traj)
    except FrontNotFoundError:
        front_speed = None
    numbers = traj.total_number_series
    write_json(man.path("summary.json"), {
        "tau_sing": tau_sing,
        "front_speed": front_speed,
        "n_initial": numbers[0, 1],
        "n_final": numbers[-1, 1],
        "t_final": numbers[-1, 0],
    })
    man.write()
    return EXIT_OK


# ---------------------------------------------------------------------------
# kpz
# ---------------------------------------------------------------------------

def cmd_kpz(args) -> int:
    man = _start(args, "kpz")
    grid = fields.make_grid(args.length, args.dx)
    delta_rho = RHO0 * args.h * np.exp(-(grid.x**2) / args.w**2)
    state = kpz.kpz_init_from_density(grid, delta_rho)
    cfg = kpz.KpzConfig(grid=grid, lam=args.lam, dt=args.dt, t_max=args.tmax,
                        snapshot_every=args.snapshot_every)
    traj = kpz.run_kpz(cfg, state)

    x = grid.x
    with open(man.path("phase.csv"), "w", newline="") as fh:
        fh.write("t,x,theta,theta_dot,rho\n")
        for t, theta, theta_dot in traj.snapshots:
            ts = _fmt(t)
            rho = RHO0 * (1.0 - 0.5 * TAU * theta_dot)
            for xi_, th, td, r in zip(x, theta, theta_dot, rho):
                fh.write(f"{ts},{_fmt(xi_)},{_fmt(th)},{_fmt(td)},{_fmt(r)}\n")

    write_json(man.path("summary.json"), {
        "blowup_time": traj.blowup_time,
        "t_final": traj.max_rate_series[-1, 0],
    })
    man.write()
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare: GP vs dispersive KPZ from matched ICs, plus the soliton fit
# ---------------------------------------------------------------------------

def cmd_compare(args) -> int:
    man = _start(args, "compare")
    grid = fields.make_grid(args.length, args.dx)
    x = grid.x
    gp_cfg = gp.GpConfig(grid=grid, lam=args.lam, dt=args.dt, t_max=args.tmax,
                         ic=gp.GaussianBump(args.h, args.w), snapshot_every=None)
    gp_state = gp_cfg.initial_state()
    dt_kpz = args.dt / 2.0
    if dt_kpz > kpz.cfl_limit(grid):
        raise GridError(
            f"dt/2 = {dt_kpz:g} violates the wave-equation CFL bound "
            f"{kpz.cfl_limit(grid):g}; reduce --dt or --dx")
    kpz_state = kpz.kpz_init_from_density(grid, gp_state.density() - RHO0)

    cadence_steps = max(1, int(round(args.compare_every / args.dt)))
    overlay_stride = max(1, int(round(args.overlay_every / args.compare_every)))
    n_chunks = int(round(args.tmax / args.compare_every))

    psi = gp_state.psi.copy()
    kin = np.exp(-1j * (1.0 - 1j * args.lam) * grid.k**2 * args.dt / 2.0)
    guard_radius = grid.length / 2.0 - 5.0 * args.w
    guard_tol = max(0.05 * abs(args.h), 1e-6) * RHO0

    diff_rows = []      # (t, linf, max_dev_kpz, min_rho_gp)
    overlay_rows = []   # (t, x, rho_gp, rho_kpz)
    min_series = [(0.0, float(np.min(np.abs(psi) ** 2)))]
    blowup_time = None
    kpz_alive = True
    soliton_snapshot = None
    t = 0.0

    def record(t, rho_gp, rho_kpz):
        linf = float(np.max(np.abs(rho_gp - rho_kpz)))
        max_dev = float(np.max(np.abs(rho_kpz - RHO0)))
        diff_rows.append((t, linf, max_dev, float(rho_gp.min())))

    rho_gp = np.abs(psi) ** 2
    record(0.0, rho_gp, kpz_state.density())
    overlay_rows.append((0.0, rho_gp.copy(), kpz_state.density()))

    stopped = None
    for chunk in range(1, n_chunks + 1):
        for _ in range(cadence_steps):
            psi *= np.exp(-2j * np.abs(psi) ** 2 * (args.dt / 2.0))
            psi = np.fft.ifft(np.fft.fft(psi) * kin)
            psi *= np.exp(-2j * np.abs(psi) ** 2 * (args.dt / 2.0))
            t += args.dt
            m = float(np.min(np.abs(psi) ** 2))
            if not math.isfinite(m):
                raise gp.GpNumericsError(f"non-finite GP density at t = {t:g}")
            min_series.append((t, m))
        if kpz_alive:
            for _ in range(2 * cadence_steps):
                kpz_state = kpz.step_kpz(kpz_state, dt_kpz, args.lam)
                peak = float(np.max(np.abs(kpz_state.theta_dot)))
                if not math.isfinite(peak) or peak > kpz.BLOWUP_THRESHOLD:
                    blowup_time = kpz_state.t
                    kpz_alive = False
                    break
        rho_gp = np.abs(psi) ** 2
        if kpz_alive:
            record(t, rho_gp, kpz_state.density())
        if chunk % overlay_stride == 0:
            overlay_rows.append((t, rho_gp.copy(),
                                 kpz_state.density() if kpz_alive else None))
        soliton_snapshot = (t, rho_gp.copy())
        disturbed = np.abs(rho_gp - RHO0) > guard_tol
        if disturbed.any() and np.abs(x[disturbed]).max() > guard_radius:
            man.warnings.append(f"wrap-around guard tripped at t = {t:g}; stopping")
            stopped = t
            break

    with open(man.path("overlay.csv"), "w", newline="") as fh:
        fh.write("t,x,rho_gp,rho_kpz\n")
        for ts, rg, rk in overlay_rows:
            tss = _fmt(ts)
            rk_list = rk if rk is not None else [None] * len(x)
            for xi_, a, b in zip(x, rg, rk_list):
                fh.write(f"{tss},{_fmt(xi_)},{_fmt(a)},{_fmt(b)}\n")
    write_csv(man.path("linf.csv"), ["t", "linf", "max_dev_kpz", "min_rho_gp"],
              diff_rows)

    series = np.array(min_series)
    traj_like = gp.GpTrajectory(config=gp_cfg, snapshots=[],
                                min_density_series=series,
                                total_number_series=series)
    tau_sing = gp.detect_singularity_time(traj_like)

    fit = {"z0": None, "mismatch": None}
    if args.lam > 0 and tau_sing is not None and soliton_snapshot is not None:
        t_snap, rho_snap = soliton_snapshot
        try:
            z0, mismatch = soliton.fit_front(grid, rho_snap, args.lam)
            fit = {"z0": z0, "mismatch": mismatch}
            prof = soliton.sonic_profile(x, z0, args.lam)
            write_csv(man.path("soliton_overlay.csv"), ["x", "rho_gp", "rho_soliton"],
                      zip(x, rho_snap, prof.rho))
            fit["t_snapshot"] = t_snap
        except FrontNotFoundError as exc:
            man.warnings.append(f"soliton fit skipped: {exc}")

    small = [r for r in diff_rows if r[2] < 0.2 * RHO0]
    write_json(man.path("summary.json"), {
        "tau_sing": tau_sing,
        "kpz_blowup_time": blowup_time,
        "max_linf_while_small": max((r[1] for r in small), default=None),
        "soliton_fit": fit,
        "t_final": t,
        "stopped_by_guard_at": stopped,
    })
    man.write()
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    man = _start(args, "sweep")
    lambdas = args.lambdas
    heights = args.heights
    widths = args.widths
    if not lambdas or not heights or not widths:
        raise ValueError("need non-empty --lambdas, --heights and --widths")
    if args.pair_mode == "zip" and len(heights) != len(widths):
        raise ValueError("--pair-mode zip needs equally long --heights and --widths")

    grid = fields.make_grid(args.length, args.dx)
    base = gp.GpConfig(grid=grid, lam=lambdas[0], dt=args.dt, t_max=args.tmax,
                       snapshot_every=None)
    if args.pair_mode == "zip":
        combos = [(lam, h, w, base) for lam in sorted(lambdas)
                  for h, w in sorted(zip(heights, widths))]
        if args.workers > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                records = list(pool.map(gp._sweep_one, combos))
        else:
            records = [gp._sweep_one(c) for c in combos]
        records.sort(key=lambda r: (r.lam, r.h, r.w))
    else:
        records = gp.scaling_sweep(lambdas, heights, widths, base,
                                   workers=args.workers)

    rows = [(r.lam, r.h, r.w, r.tau_sing, r.z, r.y) for r in records]
    write_csv(man.path("collapse.csv"),
              ["lambda", "h", "w", "tau_sing", "z", "y"], rows)

    ok = [r for r in records if r.tau_sing is not None]
    failed = [r for r in records if r.tau_sing is None]
    for r in failed:
        man.warnings.append(f"run lambda={r.lam} h={r.h} w={r.w} failed: {r.error}")
    slope = gp.fit_collapse_slope(records, z_max=args.slope_zmax)
    if math.isnan(slope):
        slope = None
        man.warnings.append("degenerate slope fit: fewer than 2 collapsed points")
    write_json(man.path("summary.json"), {
        "n_runs": len(records),
        "n_ok": len(ok),
        "n_failed": len(failed),
        "slope_fit_zmax": args.slope_zmax,
        "slope": slope,
    })
    man.write()
    return EXIT_OK if len(ok) >= 0.8 * len(records) else 1


# ---------------------------------------------------------------------------
# soliton
# ---------------------------------------------------------------------------

def _parse_speed(text: str) -> float:
    """Speeds like 'c', '0.5c', '-c', or a plain number in xi/tau units."""
    s = text.strip()
    if s.endswith("c"):
        mult = s[:-1]
        if mult in ("", "+"):
            return SOUND_SPEED
        if mult == "-":
            return -SOUND_SPEED
        return float(mult) * SOUND_SPEED
    return float(s)


def cmd_soliton(args) -> int:
    man = _start(args, "soliton")
    u = _parse_speed(args.u)
    lam = args.lam
    dz = args.dz if args.dz is not None else 0.04 / lam
    z_lo = args.zmin if args.zmin is not None else -60.0 / lam
    z_hi = args.zmax if args.zmax is not None else 60.0 / lam
    z = np.arange(z_lo, z_hi + 0.5 * dz, dz)

    if abs(u - SOUND_SPEED) < 1e-12:
        prof = soliton.sonic_profile(z, args.z0, lam)
    else:
        prof = soliton.general_profile(u, z, args.z0, lam)
    r_cont, r_euler = soliton.hydro_residual(prof)

    write_csv(man.path("profile.csv"), ["z", "v", "rho"],
              zip(prof.z, prof.v, prof.rho))
    write_json(man.path("summary.json"), {
        "u": u,
        "branch": prof.branch.value,
        "residual_continuity": r_cont,
        "residual_euler": r_euler,
    })
    man.write()
    return EXIT_OK


# ---------------------------------------------------------------------------
# polariton
# ---------------------------------------------------------------------------

def _polariton_template(args) -> polariton.PolaritonParams:
    gamma = args.gamma
    delta = args.delta_over_gamma * gamma
    Delta = abs(delta + 1j * gamma)
    Omega = args.omega_over_delta * Delta
    g = args.g_ratio * max(Omega, Delta, gamma)
    return polariton.PolaritonParams(g=g, c_light=1.0, delta=delta, gamma=gamma,
                                     Omega=Omega, C6=args.c6_sign * 1e-20)


def cmd_polariton(args) -> int:
    man = _start(args, "polariton")
    tmpl = _polariton_template(args)
    m = polariton.effective_mass(tmpl)
    lo, hi = (float(v) for v in args.scan.split(":"))
    if not 0 < lo < hi:
        raise ValueError(f"bad --scan range {args.scan}")

    grid_pts = np.linspace(lo, hi, args.points)
    rows = []
    for krb in grid_pts:
        p = polariton.params_at_kappa_rb(tmpl, krb)
        eff = polariton.effective_params(p)
        rows.append((krb, eff.interaction_sq.real, eff.interaction_sq.imag,
                     eff.interaction_num.real, eff.interaction_num.imag))

    star = None
    try:
        star = polariton.find_lossless_point(tmpl, lo, hi)
    except ValueError as exc:
        man.warnings.append(f"no lossless point located: {exc}")

    write_csv(man.path("scan.csv"),
              ["kappa_rb", "re_inv_ma_sq", "im_inv_ma_sq",
               "re_inv_ma_num", "im_inv_ma_num", "kappa_rb_star"],
              [row + (star,) for row in rows])
    summary = {"kappa_rb_star": star, "lambda_one_body": None}
    if tmpl.delta < 0:
        summary["lambda_one_body"] = polariton.one_body_lambda(tmpl.delta, tmpl.gamma)
    if star is not None:
        p_star = polariton.params_at_kappa_rb(tmpl, star)
        s = polariton.interaction_strength(m, polariton.scattering_length_numeric(p_star))
        summary["re_inv_ma_at_star"] = s.real
        summary["im_inv_ma_at_star"] = s.imag
    write_json(man.path("summary.json"), summary)
    man.write()
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip() != ""]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdiff1d",
                                 description="1D condensates with k^2 loss: "
                                 "solvers, fronts, and polariton scattering")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_default):
        p.add_argument("--out", default=out_default)
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; all dynamics are deterministic")

    p = sub.add_parser("gp", help="dissipative GP evolution of a Gaussian bump")
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--w", type=float, default=15.0)
    p.add_argument("--dx", type=float, default=0.2)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--length", type=float, default=1000.0)
    p.add_argument("--tmax", type=float, default=400.0)
    p.add_argument("--snapshot-every", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.5)
    common(p, "gp_out")
    p.set_defaults(func=cmd_gp)

    p = sub.add_parser("kpz", help="dispersive KPZ evolution from a Gaussian bump")
    p.add_argument("--lambda", dest="lam", type=float, default=0.4)
    p.add_argument("--h", type=float, default=0.05)
    p.add_argument("--w", type=float, default=200.0)
    p.add_argument("--dx", type=float, default=0.2)
    p.add_argument("--dt", type=float, default=None, help="default: CFL bound")
    p.add_argument("--length", type=float, default=6000.0)
    p.add_argument("--tmax", type=float, default=600.0)
    p.add_argument("--snapshot-every", type=float, default=50.0)
    common(p, "kpz_out")
    p.set_defaults(func=cmd_kpz)

    p = sub.add_parser("compare", help="GP vs dispersive KPZ from matched ICs")
    p.add_argument("--lambda", dest="lam", type=float, default=0.4)
    p.add_argument("--h", type=float, default=0.05)
    p.add_argument("--w", type=float, default=200.0)
    p.add_argument("--dx", type=float, default=0.2)
    p.add_argument("--dt", type=float, default=0.1,
                   help="GP step; the wave equation uses dt/2")
    p.add_argument("--length", type=float, default=6000.0)
    p.add_argument("--tmax", type=float, default=600.0)
    p.add_argument("--compare-every", type=float, default=1.0)
    p.add_argument("--overlay-every", type=float, default=50.0)
    common(p, "compare_out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="singularity-time scaling sweep")
    p.add_argument("--lambdas", type=_float_list,
                   default=[0.05, 0.1, 0.15, 0.2, 0.25, 0.3])
    p.add_argument("--heights", type=_float_list, default=[0.25, 0.2, 0.25])
    p.add_argument("--widths", type=_float_list, default=[10.0, 15.0, 40.0])
    p.add_argument("--pair-mode", choices=("cross", "zip"), default="zip",
                   help="zip pairs --heights with --widths; cross takes the product")
    p.add_argument("--dx", type=float, default=0.2)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--length", type=float, default=10000.0)
    p.add_argument("--tmax", type=float, default=2600.0)
    p.add_argument("--slope-zmax", type=float, default=1.05)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common(p, "sweep_out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("soliton", help="traveling-front profile and residuals")
    p.add_argument("--u", default="c", help="front speed, e.g. 'c', '1.2c', '-c'")
    p.add_argument("--lambda", dest="lam", type=float, default=0.4)
    p.add_argument("--z0", type=float, default=0.0)
    p.add_argument("--zmin", type=float, default=None)
    p.add_argument("--zmax", type=float, default=None)
    p.add_argument("--dz", type=float, default=None)
    common(p, "soliton_out")
    p.set_defaults(func=cmd_soliton)

    p = sub.add_parser("polariton", help="polariton scattering-length scan")
    p.add_argument("--delta-over-gamma", type=float, default=-10.0)
    p.add_argument("--omega-over-delta", type=float, default=6.0,
                   help="Omega / |Delta|")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--g-ratio", type=float, default=12.0,
                   help="g over the largest of Omega, |Delta|, gamma")
    p.add_argument("--c6-sign", type=float, default=1.0)
    p.add_argument("--scan", default="3:8", help="kappa*r_b range lo:hi")
    p.add_argument("--points", type=int, default=11)
    common(p, "polariton_out")
    p.set_defaults(func=cmd_polariton)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except soliton.InvalidSpeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (GridError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (gp.GpNumericsError, FloatingPointError) as exc:
        print(f"numeric fault: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
