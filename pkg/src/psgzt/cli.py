"""Command-line front door: every operation with reproducible file outputs.

Each subcommand writes its data file(s) plus a `<stem>_meta.json` record
(config echo, version, wall time, result summary). Exit status: 0 success,
2 domain errors, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .atlas import (CurveSample, bc_curves, boundary_c_at, general_j_branches,
                    open_grid, signum_forced_boundary, sn_curve,
                    stability_boundary_B, sweep, torus_curve_T)
from .errors import DomainError, NumericalError, PsgztError
from .floquet import char_poly, spectrum
from .io import fmt_cell, meta_path, write_csv, write_json
from .ivp import ConstantSign, detect_period, solve_bruteforce, solve_exact
from .model import Branch, ModelParams, delay_decomp
from .orbits import Subregion, build_orbit, classify_subregion, region_R, region_S
from .smooth import smooth_boundary_bisect

CURVE_IDS = ("T", "SN", "BC", "BJ", "SIGNUM_T", "B")


def _parse_grid(spec: str, pairs: int):
    """'lo:hi:n[,lo:hi:n]' -> list of numpy ranges."""
    parts = spec.split(",")
    if len(parts) != pairs:
        raise DomainError(f"--grid needs {pairs} 'lo:hi:n' triple(s), got '{spec}'")
    out = []
    for part in parts:
        bits = part.split(":")
        if len(bits) != 3:
            raise DomainError(f"bad grid triple '{part}'")
        lo, hi, n = float(bits[0]), float(bits[1]), int(bits[2])
        if n < 1 or hi < lo:
            raise DomainError(f"bad grid triple '{part}'")
        out.append(np.linspace(lo, hi, n))
    return out


def _branch(name: str) -> Branch:
    try:
        return Branch(name.lower())
    except ValueError:
        raise DomainError(f"--branch must be 'low' or 'high', got '{name}'")


def _tau_of(args) -> float:
    if args.tau is not None:
        if args.theta is not None:
            raise DomainError("give either --tau or --theta (+ --k), not both")
        return args.tau
    if args.theta is None:
        raise DomainError("one of --tau or --theta is required")
    return args.k + args.theta


def _emit(args, header, rows, results: dict, files: dict | None = None):
    config = {k: v for k, v in vars(args).items()
              if k not in ("func", "config") and not k.startswith("_")}
    meta = {"command": args.command, "config": config, "version": __version__,
            "wall_time_s": round(time.time() - args._t_start, 3),
            "results": results}
    if args.format == "json":
        payload = {"metadata": meta, "columns": list(header),
                   "rows": [[None if x == "" else x for x in r] for r in rows]}
        write_json(args.out, payload)
    else:
        write_csv(args.out, header, rows)
        write_json(meta_path(args.out), meta)
    for path, (hdr, rws) in (files or {}).items():
        write_csv(path, hdr, rws)
    print(f"wrote {args.out}")


def _stem(args, suffix: str) -> str:
    from pathlib import Path
    p = Path(args.out)
    return str(p.with_name(p.stem + suffix))


# --------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    tau = _tau_of(args)
    params = ModelParams(c=args.c, tau=tau)
    traj = solve_exact(ConstantSign(-1, 0.0), params, args.t_end, t0=args.t0)
    ts = np.linspace(args.t0, args.t_end, args.points)
    hs = traj.value(ts)
    starts = [s.t_start for s in traj.segments]
    seg_idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0,
                      len(traj.segments) - 1)
    rows = list(zip(ts, hs, seg_idx))
    zrows = [(z.t, z.direction.value, int(z.degenerate)) for z in traj.zeros]
    transient = args.transient if args.transient is not None else 0.6 * (args.t_end - args.t0)
    period = None
    if args.t_end - args.t0 >= transient + 10:
        period = detect_period(traj, transient, tol=args.tol)
    results = {"detected_period": period, "n_zeros": len(traj.zeros),
               "n_segments": len(traj.segments), "max_abs": traj.max_abs()}
    if args.dt is not None:
        brute = solve_bruteforce(ConstantSign(-1, 0.0), params, args.t_end,
                                 args.dt, t0=args.t0)
        gap = float(np.abs(traj.value(brute.t) - brute.h).max())
        results["bruteforce_sup_gap"] = gap
    _emit(args, ("t", "h", "segment_index"), rows, results,
          files={_stem(args, "_zeros.csv"):
                 (("z", "direction", "degenerate"), zrows)})
    return 0


def cmd_orbit(args) -> int:
    params = ModelParams(c=args.c, tau=_tau_of(args))
    orbit = build_orbit(params, _branch(args.branch))
    results = {"alpha": orbit.alpha, "hprime_alpha": orbit.phase.hprime_alpha,
               "valid": orbit.valid.value, "reason": orbit.reason,
               "subregion": orbit.shape.subregion.value,
               "h_at_t2": orbit.shape.h_at_t2,
               "degenerate_phase": orbit.phase.degenerate}
    rows = []
    if args.emit_profile:
        ts = orbit.alpha + np.linspace(0.0, 1.0, args.points, endpoint=False)
        hs = orbit.value(ts)
        res = np.abs(hs + orbit.value(ts + 0.5))
        rows = list(zip(ts, hs, res))
    _emit(args, ("t", "h", "sym_residual"), rows, results)
    return 0


def cmd_region(args) -> int:
    thetas, cs = _parse_grid(args.grid, 2)
    rows = []
    for th in thetas:
        th = float(th) % 1.0
        for c in cs:
            r = region_R(th, float(c))
            s = region_S(th, float(c))
            sub = ""
            if 0.0 < th < 0.5:
                try:
                    sub = classify_subregion(th, float(c)).value
                except PsgztError:
                    sub = ""
            rows.append((th, float(c), int(r.in_R), int(s.in_S), sub,
                         r.binding_constraint))
    _emit(args, ("theta", "c", "in_R", "in_S", "subregion", "binding_constraint"),
          rows, {"n_points": len(rows)})
    return 0


def cmd_floquet(args) -> int:
    tau = _tau_of(args)
    params = ModelParams(c=args.c, tau=tau)
    br = _branch(args.branch)
    sp = spectrum(char_poly(params, br))
    rows = [(tau, args.c, br.value, z.real, z.imag, abs(z)) for z in sp.roots]
    rho = sp.crossing[1] if sp.crossing else None
    vrows = [(tau, args.c, br.value, sp.verdict.value, sp.max_modulus, rho)]
    results = {"verdict": sp.verdict.value, "max_modulus": sp.max_modulus,
               "rho": rho, "degree": len(sp.roots)}
    _emit(args, ("tau", "c", "branch", "re", "im", "modulus"), rows, results,
          files={_stem(args, "_verdict.csv"):
                 (("tau", "c", "branch", "verdict", "max_modulus", "rho"), vrows)})
    return 0


def cmd_curve(args) -> int:
    upper = args.half == "upper"
    cid = args.id
    if cid == "T":
        samples = torus_curve_T(args.k, upper, points=args.points)
    elif cid == "SN":
        samples = sn_curve(points=args.points)
    elif cid == "BC":
        samples = bc_curves(points=args.points)
    elif cid == "BJ":
        if args.j is None:
            raise DomainError("--j is required for --id BJ")
        base = open_grid(0.0, 0.5, args.points) + (0.5 if upper else 0.0)
        samples = general_j_branches(args.k, upper, args.j)(base)
    elif cid == "SIGNUM_T":
        samples = [signum_forced_boundary(args.k, upper)]
    elif cid == "B":
        (taus,) = _parse_grid(args.grid, 1) if args.grid else (np.linspace(0.02, 3.48, 694),)
        samples = stability_boundary_B(taus)
    else:
        raise DomainError(f"--id must be one of {CURVE_IDS}")
    rows = [(s.curve_id, s.tau, s.c, s.rho, s.j) for s in samples]
    _emit(args, ("curve_id", "tau", "c", "rho", "j"), rows,
          {"n_samples": len(rows)})
    return 0


def cmd_sweep(args) -> int:
    taus, cs = _parse_grid(args.grid, 2)
    tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
    rows_d = sweep(taus, cs, tasks=tasks)
    header = ("tau", "c", "in_R", "in_S", "verdict", "max_modulus", "rho",
              "orbit_valid", "error")
    rows = [tuple(r[k] for k in header) for r in rows_d]
    _emit(args, header, rows, {"n_points": len(rows), "tasks": list(tasks)})
    return 0


def cmd_compare(args) -> int:
    taus = [float(x) for x in str(args.tau).split(",")]
    rows = []
    for tau in taus:
        c_ps = boundary_c_at(tau)
        c_lo = args.c_lo if args.c_lo is not None else 0.7 * c_ps
        c_hi = args.c_hi if args.c_hi is not None else 1.4 * c_ps
        est = smooth_boundary_bisect(args.kappa, tau, c_lo, c_hi, dc=args.tol)
        rows.append((tau, args.kappa, est.c, c_ps, abs(est.c - c_ps) / c_ps))
    _emit(args, ("tau", "kappa", "c_smooth", "c_psgzt", "rel_gap"), rows,
          {"n_points": len(rows)})
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psgzt", description=__doc__)
    ap.add_argument("--config", help="JSON file (or meta JSON) providing defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_default):
        p.add_argument("--out", default=out_default)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-6)

    def tau_theta(p):
        p.add_argument("--tau", type=float, default=None)
        p.add_argument("--theta", type=float, default=None,
                       help="fractional delay; combined with --k as tau = k + theta")
        p.add_argument("--k", type=int, default=0)

    p = sub.add_parser("simulate", help="exact event-driven IVP solve")
    tau_theta(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=None,
                   help="also run the brute-force oracle at this step")
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--transient", type=float, default=None)
    common(p, "psgzt_simulate.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("orbit", help="closed-form 1:1 orbit")
    tau_theta(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--branch", default="low")
    p.add_argument("--emit-profile", action="store_true")
    p.add_argument("--points", type=int, default=1000)
    common(p, "psgzt_orbit.csv")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("region", help="existence-region grid")
    p.add_argument("--grid", required=True, help="thmin:thmax:n,cmin:cmax:n")
    common(p, "psgzt_region.csv")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("floquet", help="multiplier spectrum and verdict")
    tau_theta(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--branch", default="low")
    common(p, "psgzt_floquet.csv")
    p.set_defaults(func=cmd_floquet)

    p = sub.add_parser("curve", help="bifurcation / boundary curves")
    p.add_argument("--id", required=True, choices=CURVE_IDS)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--half", choices=("lower", "upper"), default="lower")
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--grid", default=None, help="taumin:taumax:n (for --id B)")
    common(p, "psgzt_curve.csv")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("sweep", help="verdicts over a (tau, c) lattice")
    p.add_argument("--grid", required=True, help="taumin:taumax:n,cmin:cmax:n")
    p.add_argument("--tasks", default="region,orbit,floquet")
    common(p, "psgzt_sweep.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="smooth-model boundary vs closed form")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--tau", required=True, help="delay or comma list of delays")
    p.add_argument("--c-lo", dest="c_lo", type=float, default=None)
    p.add_argument("--c-hi", dest="c_hi", type=float, default=None)
    common(p, "psgzt_compare.csv")
    # boundary bisection resolves c to --tol (default 1e-3 here)
    p.set_defaults(func=cmd_compare, tol=1e-3)

    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            print("--config needs a path", file=sys.stderr)
            return 2
        with open(argv[i + 1]) as fh:
            payload = json.load(fh)
        del argv[i:i + 2]
        config = payload.get("config", payload)
        cmd = config.get("command") or payload.get("metadata", {}).get("command")
        explicit = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
        extra = []
        for key, val in config.items():
            if key == "command" or val is None:
                continue
            flag = "--" + key.replace("_", "-")
            if flag in explicit:
                continue
            if isinstance(val, bool):
                if val:
                    extra.append(flag)
                continue
            extra += [flag, str(val)]
        if not argv or argv[0].startswith("--"):
            argv = ([cmd] if cmd else []) + argv
        argv = [argv[0]] + extra + argv[1:]
    args = ap.parse_args(argv)
    args._t_start = time.time()
    try:
        return args.func(args)
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
