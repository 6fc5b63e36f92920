"""Stability of symmetric period-one orbits.

Zeros of a small perturbation shift, to leading order, by the perturbation
value over the orbit slope h'(alpha); integrating the induced sign
differences over one period gives exact linear recurrences for the
deviation E at the orbit zeros. With tau = k + theta their nontrivial
per-period multipliers are the roots of the reduced characteristic
polynomial

    D_{2k+1}(L) = (L - 1) L^{2k}   + (4/h') L^k     - 4/h'^2    theta in (0, 1/2)
    D_{2k+2}(L) = (L - 1) L^{2k+1} + (4/h') L^{k+1} + 4/h'^2    theta in (1/2, 1).

The trivial translation multiplier L = 1 is excluded structurally: roots are
taken from the reduced polynomial only, and the power iteration advances the
observable y_n = E_n + E_{n+1}, which vanishes identically on the
translation mode (E ~ (-1)^n) and obeys y_{n+1} = y_n - (2/h') y_{n-D} with
D = 2k or 2k + 1 per half-step; its per-period growth matches the reduced
polynomial's dominant root modulus.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (ConvergenceFailure, DegenerateOrbit, HalfIntegerDelay,
                     NoOrbit)
from .model import Branch, ModelParams
from .orbits import Validity, build_orbit

CRITICAL_BAND = 1e-9
RESIDUAL_SCALE = 1e-10


class Verdict(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    CRITICAL = "critical"


@dataclass(frozen=True)
class CharPoly:
    degree: int
    coefficients: np.ndarray     # monic, descending powers
    hprime: float
    k: int
    upper: bool                  # theta in (1/2, 1)

    def __call__(self, lam):
        return np.polyval(self.coefficients, lam)


@dataclass(frozen=True)
class FloquetSpectrum:
    roots: np.ndarray
    max_modulus: float
    crossing: Optional[Tuple[float, float]]   # (omega in (0, pi), rho = omega / 2pi)
    verdict: Verdict


def _gate(params: ModelParams, branch: Branch):
    dec = params.decomp
    if dec.boundary:
        raise HalfIntegerDelay(
            f"tau = {params.tau} is within 1e-9 of j/2; multipliers jump there")
    orbit = build_orbit(params, branch)
    if orbit.valid is Validity.INVALID:
        raise NoOrbit(f"no valid 1:1 orbit at tau={params.tau}, c={params.c}, "
                      f"{branch.value}: {orbit.reason}")
    if orbit.valid is Validity.VALID_DEGENERATE and not orbit.phase.degenerate:
        # fold-locus orbits are fine; grazing zeros are not
        raise DegenerateOrbit(f"orbit at tau={params.tau}, c={params.c} has "
                              f"degenerate zeros ({orbit.reason})")
    return dec, orbit


def char_poly(params: ModelParams, branch: Branch) -> CharPoly:
    """Reduced characteristic polynomial (trivial L = 1 factored out)."""
    dec, orbit = _gate(params, branch)
    k = dec.k
    upper = dec.theta > 0.5
    h = orbit.phase.hprime_alpha
    if not h > 0.0:
        raise NoOrbit(f"slope at the upward zero is {h} <= 0")
    if upper:
        degree = 2 * k + 2
        coeffs = np.zeros(degree + 1)
        coeffs[0] += 1.0                       # L^{2k+2}
        coeffs[degree - (2 * k + 1)] += -1.0   # L^{2k+1}
        coeffs[degree - (k + 1)] += 4.0 / h    # L^{k+1}
        coeffs[degree] += 4.0 / h ** 2
    else:
        degree = 2 * k + 1
        coeffs = np.zeros(degree + 1)
        coeffs[0] += 1.0                       # L^{2k+1}
        coeffs[degree - 2 * k] += -1.0         # L^{2k}
        coeffs[degree - k] += 4.0 / h          # L^k
        coeffs[degree] += -4.0 / h ** 2
    return CharPoly(degree, coeffs, h, k, upper)


def spectrum(poly: CharPoly) -> FloquetSpectrum:
    """All roots via the companion matrix, Newton-polished, with verdict."""
    coeffs = poly.coefficients
    roots = np.roots(coeffs).astype(complex)
    dcoeffs = np.polyder(coeffs)
    total_its = 0
    for i, r in enumerate(roots):
        z = complex(r)
        for _ in range(50):
            total_its += 1
            if total_its > 1000:
                raise ConvergenceFailure(
                    f"root polishing exceeded 1000 iterations; best residual "
                    f"{abs(np.polyval(coeffs, z)):.3e}")
            f = np.polyval(coeffs, z)
            if abs(f) < 1e-15 * (1.0 + abs(z)) ** poly.degree:
                break
            d = np.polyval(dcoeffs, z)
            if d == 0:
                break
            step = f / d
            z -= step
            if abs(step) < 1e-16 * (1.0 + abs(z)):
                break
        roots[i] = z
    resid = np.abs(np.polyval(coeffs, roots))
    bound = RESIDUAL_SCALE * (1.0 + np.abs(roots)) ** poly.degree
    if np.any(resid > bound):
        raise ConvergenceFailure(
            f"root residuals {resid.max():.3e} exceed bound")
    mods = np.abs(roots)
    max_mod = float(mods.max())
    crossing = None
    on_circle = np.abs(mods - 1.0) <= CRITICAL_BAND
    cands = [z for z, oc in zip(roots, on_circle) if oc and z.imag > 0.0]
    if cands:
        z = min(cands, key=lambda w: abs(abs(w) - 1.0))
        omega = float(np.angle(z))
        crossing = (omega, omega / (2.0 * math.pi))
    if max_mod < 1.0 - CRITICAL_BAND:
        verdict = Verdict.STABLE
    elif max_mod <= 1.0 + CRITICAL_BAND:
        verdict = Verdict.CRITICAL
    else:
        verdict = Verdict.UNSTABLE
    return FloquetSpectrum(roots, max_mod, crossing, verdict)


def power_iteration_check(params: ModelParams, branch: Branch,
                          iterations: int = 20000, seed: int = 0) -> float:
    """Per-period growth ratio of the exact perturbation recurrences.

    Independent of spectrum(): growth is extracted from the iterated sequence
    by consecutive-ratio and conjugate-pair fits, never by solving the
    polynomial. Matches spectrum(...).max_modulus within 1e-6 when the
    dominant root is simple.
    """
    dec, orbit = _gate(params, branch)
    h = orbit.phase.hprime_alpha
    if not h > 0.0:
        raise NoOrbit(f"slope at the upward zero is {h} <= 0")
    beta = 2.0 / h
    D = 2 * dec.k + (1 if dec.theta > 0.5 else 0)

    rng = np.random.default_rng(seed)
    buf = list(rng.standard_normal(D + 1))

    def advance_period():
        for _ in range(2):
            buf.append(buf[-1] - beta * buf[0])
            buf.pop(0)
        return buf[-1]

    def renorm():
        m = max(abs(x) for x in buf)
        if m == 0.0:
            buf[:] = list(rng.standard_normal(D + 1))
            return
        if m > 1e200 or m < 1e-200:
            for i in range(len(buf)):
                buf[i] /= m

    warmup = 40 + 10 * (D + 2)
    for _ in range(warmup):
        advance_period()
        renorm()

    ratio_hist: list = []
    pair_hist: list = []
    periods = warmup
    while periods < iterations:
        renorm()
        z = [advance_period() for _ in range(5)]
        periods += 5
        scale = max(abs(x) for x in z)
        if scale == 0.0 or not math.isfinite(scale):
            continue
        if min(abs(z[2]), abs(z[3])) > 1e-280:
            ratio_hist.append(abs(z[3] / z[2]))
        det = z[1] * z[1] - z[0] * z[2]
        if abs(det) > 1e-9 * (z[1] * z[1] + abs(z[0] * z[2]) + 1e-300):
            # z2 = s z1 - p z0 ; z3 = s z2 - p z1  =>  p = (z2^2 - z1 z3) / det
            p = (z[2] * z[2] - z[1] * z[3]) / det
            if p > 0.0 and math.isfinite(p):
                pair_hist.append(math.sqrt(p))
        for hist in (ratio_hist, pair_hist):
            if len(hist) >= 3:
                last = hist[-3:]
                span = max(last) - min(last)
                if span <= 1e-9 * max(1.0, abs(last[-1])):
                    return float(last[-1])
    raise ConvergenceFailure(
        f"growth ratio did not stabilize within {iterations} periods "
        "(dominance ratio too close to 1)")
