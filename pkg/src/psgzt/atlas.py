"""Closed-form bifurcation curves and parameter sweeps.

On each half-interval of the delay the stable period-one orbit loses
stability where a conjugate multiplier pair reaches the unit circle at
angle w = 2*pi*j/(4k+1) (lower half) or 2*pi*j/(4k+3) (upper half); only
residues j = 1 (mod 4) for odd j and j = 0 / 2 (mod 4) for even j give a
positive slope, and j = 1 always carries the largest slope

    h'(alpha) = csc(pi / (2*(4k+1)))        lower half
    h'(alpha) = csc(pi / (2*(4k+3)))        upper half,

hence the torus curve

    c^2 = (csc(pi/(2(4k+1))) - 1)^2 + u^2(theta)      k >= 1, theta in (0,1/2)
    c^2 = (csc(pi/(2(4k+3))) + 1)^2 + v^2(theta)      k >= 0, theta in (1/2,1)

with rotation number 1/(4k+1) resp. 1/(4k+3), constant along each segment.
For tau in [1/2 - theta_c, theta_c] the boundary is instead the fold line
c = |u(tau)|, and on the remaining slivers of (0, 1/2) the orbit ceases to
exist across the graze curves (border collision).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import DomainError, InvalidJ, NoTorusBranch, PsgztError
from .floquet import Verdict, char_poly, spectrum
from .model import Branch, ModelParams, delay_decomp, u_of, v_of
from .orbits import (Validity, build_orbit, region_R, region_S, theta_hat,
                     w_minus_sq, w_plus_sq)

GRID_INSET = 1e-6


@dataclass(frozen=True)
class CurveSample:
    curve_id: str
    tau: float
    c: float
    rho: Optional[float] = None
    j: Optional[int] = None


def open_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n points strictly inside (lo, hi), inset by GRID_INSET at each end."""
    if n < 1 or hi <= lo:
        raise DomainError(f"bad grid ({lo}, {hi}, {n})")
    if n == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo + GRID_INSET, hi - GRID_INSET, n)


# --------------------------------------------------------------------------
# torus / fold / border-collision curves

def _csc(x: float) -> float:
    return 1.0 / math.sin(x)


def torus_curve_T(k: int, upper: bool, thetas: Optional[Sequence[float]] = None,
                  points: int = 50) -> List[CurveSample]:
    """Torus-bifurcation segment on one open half-interval of the delay."""
    if not upper and k < 1:
        raise NoTorusBranch("no unit-circle pair exists for k = 0 on (0, 1/2)")
    if k < 0:
        raise DomainError("k must be a nonnegative integer")
    if thetas is None:
        thetas = open_grid(0.0, 0.5, points) + (0.5 if upper else 0.0)
    out = []
    if upper:
        amp = _csc(math.pi / (2.0 * (4 * k + 3))) + 1.0
        rho = 1.0 / (4 * k + 3)
    else:
        amp = _csc(math.pi / (2.0 * (4 * k + 1))) - 1.0
        rho = 1.0 / (4 * k + 1)
    for th in thetas:
        if upper:
            if not 0.5 < th < 1.0:
                raise DomainError(f"theta = {th} outside (1/2, 1)")
            w = v_of(th)
        else:
            if not 0.0 < th < 0.5:
                raise DomainError(f"theta = {th} outside (0, 1/2)")
            w = u_of(th)
        out.append(CurveSample("T", k + th, math.sqrt(amp * amp + w * w), rho, 1))
    return out


def sn_curve(thetas: Optional[Sequence[float]] = None,
             points: int = 50) -> List[CurveSample]:
    """Fold line c = |u(theta)| on [1/2 - theta_hat, theta_hat]."""
    th_hat = theta_hat()
    if thetas is None:
        thetas = np.linspace(0.5 - th_hat, th_hat, points)
    out = []
    for th in thetas:
        if not 0.5 - th_hat - 1e-9 <= th <= th_hat + 1e-9:
            raise DomainError(f"theta = {th} outside [1/2 - theta_hat, theta_hat]")
        out.append(CurveSample("SN", float(th), abs(u_of(th)), None, None))
    return out


def bc_curves(points: int = 40) -> List[CurveSample]:
    """Border-collision arcs: graze boundaries of the two orbit families."""
    th_hat = theta_hat()
    out = []
    for th in np.linspace(th_hat, 0.5, points):
        c = math.sqrt(w_minus_sq(min(float(th), 0.5)))
        out.append(CurveSample("BC_minus", float(th), c))
        out.append(CurveSample("BC_minus", 0.5 - float(th), c))
    for th in np.linspace(0.25, th_hat, points):
        c = math.sqrt(w_plus_sq(float(th)))
        out.append(CurveSample("BC_plus", float(th), c))
        out.append(CurveSample("BC_plus", 0.5 - float(th), c))
    return sorted(out, key=lambda s: (s.curve_id, s.tau))


def valid_j_set(k: int, upper: bool) -> list:
    """j values whose unit-circle pair has positive orbit slope."""
    j_max = 2 * k + (1 if upper else 0)
    good = []
    for j in range(1, j_max + 1):
        if j % 2 == 1:
            ok = (j - 1) % 4 == 0          # csc branch, positive sign
        else:
            ok = (j % 4 == 2) if upper else (j % 4 == 0)   # sec branch
        if ok:
            good.append(j)
    return good


def hprime_for_j(k: int, upper: bool, j: int) -> float:
    """Orbit slope pinned by the unit-circle pair at angle 2*pi*j/(4k+1 or 3)."""
    if j not in valid_j_set(k, upper):
        raise InvalidJ(f"j = {j} invalid for k = {k}, "
                       f"{'upper' if upper else 'lower'} half (valid: {valid_j_set(k, upper)})")
    denom = 4 * k + 3 if upper else 4 * k + 1
    x = j * math.pi / (2.0 * denom)
    return _csc(x) if j % 2 == 1 else 1.0 / math.cos(x)


def general_j_branches(k: int, upper: bool, j: int):
    """Sampler for the unit-circle branch of index j; j = 1 reproduces T."""
    h = hprime_for_j(k, upper, j)
    denom = 4 * k + 3 if upper else 4 * k + 1
    rho = j / denom
    rho_principal = min(rho, 1.0 - rho)   # pair angle folded into (0, pi)

    def sample(thetas: Sequence[float]) -> List[CurveSample]:
        out = []
        for th in thetas:
            if upper:
                if not 0.5 < th < 1.0:
                    raise DomainError(f"theta = {th} outside (1/2, 1)")
                c = math.sqrt((h + 1.0) ** 2 + v_of(th) ** 2)
            else:
                if not 0.0 < th < 0.5:
                    raise DomainError(f"theta = {th} outside (0, 1/2)")
                c = math.sqrt((h - 1.0) ** 2 + u_of(th) ** 2)
            out.append(CurveSample("BJ", k + th, c, rho_principal, j))
        return out

    return sample


def secondary_boundary_js(k: int, upper: bool) -> list:
    """Valid j != 1 ranked by slope (largest first): successive saddle transitions."""
    js = [j for j in valid_j_set(k, upper) if j != 1]
    return sorted(js, key=lambda j: -hprime_for_j(k, upper, j))


def signum_forced_boundary(k: int, upper: bool) -> CurveSample:
    """Flat-in-theta boundary of the relay-forced variant (u = v = 0 limit)."""
    if upper:
        c = _csc(math.pi / (2.0 * (4 * k + 3))) + 1.0
        return CurveSample("SIGNUM_T", k + 0.75, c, 1.0 / (4 * k + 3), 1)
    if k < 1:
        c = 0.0
    else:
        c = _csc(math.pi / (2.0 * (4 * k + 1))) - 1.0
    return CurveSample("SIGNUM_T", k + 0.25, c, 1.0 / (4 * k + 1) if k else None, 1)


# --------------------------------------------------------------------------
# composite stability boundary

def boundary_c_at(tau: float) -> float:
    """Stability-boundary value of c at a delay off the half-integer lines."""
    dec = delay_decomp(tau)
    k, th = dec.k, dec.theta
    th_hat = theta_hat()
    if k == 0 and th < 0.5:
        if 0.5 - th_hat <= th <= th_hat:
            return abs(u_of(th))
        thm = th if th > 0.25 else 0.5 - th
        return math.sqrt(w_minus_sq(thm))
    if th < 0.5:
        return torus_curve_T(k, False, [th])[0].c
    return torus_curve_T(k, True, [th])[0].c


def _boundary_id_at(tau: float) -> str:
    dec = delay_decomp(tau)
    th_hat = theta_hat()
    if dec.k == 0 and dec.theta < 0.5:
        return "SN" if 0.5 - th_hat <= dec.theta <= th_hat else "BC_minus"
    return "T"


def boundary_rho_at(tau: float) -> Optional[float]:
    dec = delay_decomp(tau)
    if dec.k == 0 and dec.theta < 0.5:
        return None
    return 1.0 / (4 * dec.k + 1) if dec.theta < 0.5 else 1.0 / (4 * dec.k + 3)


def stability_boundary_B(tau_grid: Sequence[float]) -> List[CurveSample]:
    """Composite boundary: SN / BC arcs for tau < 1/2, torus segments beyond,
    plus paired samples bounding the vertical joins at half-integer delays."""
    taus = sorted(float(t) for t in tau_grid)
    if not taus:
        return []
    out = []
    for t in taus:
        dec = delay_decomp(t)
        if dec.boundary:
            continue
        out.append(CurveSample(_boundary_id_at(t), t, boundary_c_at(t),
                               boundary_rho_at(t), None))
    lo, hi = taus[0], taus[-1]
    j = max(1, int(math.ceil(lo / 0.5)))
    while j * 0.5 < hi:
        tj = j * 0.5
        eps = GRID_INSET
        c_left = boundary_c_at(tj - eps)
        c_right = boundary_c_at(tj + eps)
        out.append(CurveSample("B_vertical", tj, min(c_left, c_right)))
        out.append(CurveSample("B_vertical", tj, max(c_left, c_right)))
        j += 1
    return sorted(out, key=lambda s: (s.tau, s.c))


# --------------------------------------------------------------------------
# grid sweeps

def _sweep_point(args):
    tau, c, tasks = args
    row = {"tau": tau, "c": c, "in_R": "", "in_S": "", "orbit_valid": "",
           "verdict": "", "max_modulus": "", "rho": "", "error": ""}
    try:
        dec = delay_decomp(tau)
        if "region" in tasks:
            r = region_R(dec.theta, c)
            row["in_R"] = int(r.in_R)
            row["in_S"] = int(region_S(dec.theta, c).in_S)
        if "orbit" in tasks or "floquet" in tasks:
            try:
                orb = build_orbit(ModelParams(c=c, tau=tau), Branch.LOW)
                row["orbit_valid"] = orb.valid.value
                orbit_ok = orb.valid is not Validity.INVALID
            except PsgztError as e:
                row["orbit_valid"] = "none"
                row["error"] = type(e).__name__
                orbit_ok = False
            if "floquet" in tasks and orbit_ok:
                sp = spectrum(char_poly(ModelParams(c=c, tau=tau), Branch.LOW))
                row["verdict"] = sp.verdict.value
                row["max_modulus"] = sp.max_modulus
                if sp.crossing is not None:
                    row["rho"] = sp.crossing[1]
    except PsgztError as e:
        row["error"] = type(e).__name__
    return row


def sweep(tau_values: Sequence[float], c_values: Sequence[float],
          tasks: Iterable[str] = ("region", "orbit", "floquet"),
          workers: Optional[int] = None) -> List[dict]:
    """Per-point verdicts over the lattice, ordered by (tau, c).

    Per-point errors are recorded inline and never abort the sweep. Worker
    count defaults to the PSGZT_THREADS environment variable (1 = serial).
    """
    tasks = tuple(tasks)
    bad = [t for t in tasks if t not in ("region", "orbit", "floquet")]
    if bad:
        raise DomainError(f"unknown sweep tasks {bad}")
    if workers is None:
        workers = int(os.environ.get("PSGZT_THREADS", "1"))
    items = [(float(tau), float(c), tasks)
             for tau in sorted(tau_values) for c in sorted(c_values)]
    if workers > 1 and len(items) > 64:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_sweep_point, items, chunksize=64))
    else:
        rows = [_sweep_point(it) for it in items]
    rows.sort(key=lambda r: (r["tau"], r["c"]))
    return rows
