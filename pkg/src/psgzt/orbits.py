"""Closed-form symmetric period-one orbits and their existence regions.

A candidate orbit is h(t) = p(t) + (c/2pi)*(sin(2*pi*t) - sin(2*pi*alpha))
with p piecewise linear over one period; the breakpoint pattern depends on
which of theta = 0, (0,1/2), 1/2, (1/2,1) applies. Candidates are genuine
solutions exactly when h > 0 a.e. on (alpha, alpha + 1/2), which carves the
two parameter regions:

  * phases in [-1/4, 1/4] (branch LOW) exist on a region bounded below by
    c^2 = u^2(theta) near theta = 1/4, by the smallest root w_-^2(theta) of
    the graze condition on the interior minimum for theta near 1/2 (reflected
    for theta near 0), and for theta in (1/2, 1) by
    c^2 >= v^2 + ((pi/2 + v*cos(2*pi*theta)) / sin(2*pi*theta))^2;
  * phases in [1/4, 3/4] (branch HIGH) exist only for theta within
    [1/2 - theta_c, theta_c] of 1/4 and u^2 <= c^2 <= w_+^2(theta).

theta_c (about 0.46964) is the pinch where both graze curves meet the cone
c = |u(theta)|. Everything here is double-entry: region verdicts come from
the closed-form clauses AND from a numeric positivity check on the built
profile, and disagreement beyond the stated margin raises.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InternalInconsistency
from .ivp import Segment, SegmentHistory
from .model import (TWO_PI, Branch, ModelParams, PhaseSolution, solve_phase,
                    u_of, v_of)

THETA_SNAP = 1e-9
POSITIVITY_EPS = 1e-10
DOUBLE_ENTRY_MARGIN = 1e-8


class Subregion(enum.Enum):
    PLAIN = "plain"
    II = "II"       # interior extrema present, orbit still valid
    I = "I"         # interior extrema cross zero: invalid
    III = "III"     # slope kinks cross zero (theta in (1/2,1)): invalid


class Validity(enum.Enum):
    VALID = "valid"
    VALID_DEGENERATE = "valid_degenerate"   # grazing zeros on a region boundary
    INVALID = "invalid"


@dataclass(frozen=True)
class RegionVerdict:
    in_R: bool
    in_S: bool
    binding_constraint: str
    margin: float    # signed distance in c^2 to the binding boundary


@dataclass(frozen=True)
class OrbitShape:
    t1: Optional[float]          # first interior critical point, cos(2*pi*t1) = -1/c
    t2: Optional[float]
    h_at_t2: Optional[float]
    subregion: Subregion


@dataclass(frozen=True)
class OrbitProfile:
    params: ModelParams
    phase: PhaseSolution
    pieces: tuple                # Segment tuple covering [alpha, alpha + 1)
    valid: Validity
    reason: str
    shape: OrbitShape

    @property
    def alpha(self) -> float:
        return self.phase.alpha

    def value(self, t):
        """Evaluate the (period-one) profile at arbitrary times."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        r = np.mod(t_arr - self.alpha, 1.0)
        c = self.params.c
        # piece lookup via interior breakpoints only: rounding in t_end - alpha
        # must not open gaps at the period seam
        bounds = np.array([seg.t_start - self.alpha for seg in self.pieces[1:]])
        idx = np.searchsorted(bounds, r, side="right")
        out = np.empty_like(t_arr)
        for i, seg in enumerate(self.pieces):
            m = idx == i
            if np.any(m):
                out[m] = seg.value(self.alpha + r[m], c)
        return out if np.ndim(t) else float(out[0])

    def history(self) -> SegmentHistory:
        """Restriction to [alpha - tau, alpha] in solver form (orbit feeding)."""
        tau = self.params.tau
        a = self.alpha
        # nondegenerate zeros of the orbit at a - j/2, j = 1, 2, ...
        zs = []
        j = 1
        while a - 0.5 * j > a - tau:
            zs.append(a - 0.5 * j)
            j += 1
        zs = sorted(zs)
        lead = -1 if (j % 2 == 1) else 1   # sign on (a - tau, first zero); h < 0 on (a - 1/2, a)
        # segments shifted by integer periods to cover [a - tau, a]
        segs = []
        shift_max = int(math.ceil(tau)) + 1
        for n in range(-shift_max, 1):
            for seg in self.pieces:
                segs.append(Segment(seg.t_start + n, seg.t_end + n,
                                    seg.slope, _shifted_offset(seg, n)))
        segs = [s for s in segs if s.t_end > a - tau - 1e-9 and s.t_start < a + 1e-9]
        segs.sort(key=lambda s: s.t_start)
        return SegmentHistory(t0=a, h0=0.0, zeros=tuple(zs), lead_sign=lead,
                              segments=tuple(segs), c=self.params.c)


def _shifted_offset(seg: Segment, n: int) -> float:
    # on [t_start + n, t_end + n) the periodic orbit is A - s*n + s*t + (c/2pi) sin(2pi t)
    return seg.offset - seg.slope * n


# --------------------------------------------------------------------------
# profile construction

def _pieces_for(theta: float, alpha: float, c: float):
    """Breakpoints and affine parts of p over [alpha, alpha + 1)."""
    sin_a = math.sin(TWO_PI * alpha)
    base = -(c / TWO_PI) * sin_a   # constant folded into every offset

    def seg(lo, hi, slope, p_const):
        # p(t) = p_const + slope * t on [lo, hi)
        return Segment(lo, hi, slope, p_const + base)

    a = alpha
    if theta == 0.0:
        return (seg(a, a + 0.5, -1, a),
                seg(a + 0.5, a + 1.0, +1, -1.0 - a))
    if theta == 0.5:
        return (seg(a, a + 0.5, +1, -a),
                seg(a + 0.5, a + 1.0, -1, 1.0 + a))
    if theta < 0.5:
        return (seg(a, a + theta, +1, -a),
                seg(a + theta, a + theta + 0.5, -1, 2.0 * theta + a),
                seg(a + theta + 0.5, a + 1.0, +1, -1.0 - a))
    return (seg(a, a + theta - 0.5, -1, a),
            seg(a + theta - 0.5, a + theta, +1, 1.0 - 2.0 * theta - a),
            seg(a + theta, a + 1.0, -1, 1.0 + a))


def _snap_theta(theta: float) -> float:
    for special in (0.0, 0.25, 0.5, 0.75, 1.0):
        if abs(theta - special) <= THETA_SNAP:
            return special % 1.0
    return theta


def _interior_extrema(c: float):
    """Critical points t1 in (1/4,1/2), t2 in (1/2,3/4) of the rising piece, if any."""
    if c <= 1.0:
        return None, None
    t1 = math.acos(-1.0 / c) / TWO_PI
    return t1, 1.0 - t1


# --------------------------------------------------------------------------
# theta_hat and the graze-boundary functions

@lru_cache(maxsize=1)
def theta_hat() -> float:
    """Pinch point in [1/4, 1/2] where the graze curves meet the cone c = u(theta)."""

    def eq(th):
        uu = u_of(th)
        s = math.sqrt(max(uu * uu - 1.0, 0.0))
        return uu * math.sin(s) + math.cos(TWO_PI * th) * s - math.sin(TWO_PI * th)

    lo = 0.25 + 1.0 / TWO_PI + 1e-13   # u(theta) = 1 at the left end
    return float(brentq(eq, lo, 0.5, xtol=1e-14))


def _w_expr(theta: float, c2: np.ndarray, plus: bool) -> np.ndarray:
    """Graze function whose sign matches h at the interior minimum t2."""
    uu = u_of(theta)
    c2 = np.asarray(c2, dtype=float)
    s1 = np.sqrt(np.maximum(c2 - 1.0, 0.0))
    s2 = np.sqrt(np.maximum(c2 - uu * uu, 0.0))
    sn, cs = math.sin(TWO_PI * theta), math.cos(TWO_PI * theta)
    sign = 1.0 if plus else -1.0
    return uu * (sn - cs * s1) + sign * s2 * (sn * s1 + cs) - c2 * np.sin(s1)


def _smallest_w_root(theta: float, plus: bool) -> float:
    u2 = u_of(theta) ** 2
    lo, hi = max(1.0, u2), u2 + 1.0
    # c^2 = u^2 + 1 is always a spurious root (sin(u) = -cos(2 pi theta)); drop it
    grid = np.linspace(lo, hi, 4001)[:-1]
    vals = _w_expr(theta, grid, plus)
    sgn = np.sign(vals)
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    if len(flips) == 0:
        return hi
    i = flips[0]
    return float(brentq(lambda c2: float(_w_expr(theta, c2, plus)),
                        grid[i], grid[i + 1], xtol=1e-13))


@lru_cache(maxsize=4096)
def w_minus_sq(theta: float) -> float:
    """Smallest c^2 grazing the interior minimum (LOW branch), theta in [theta_hat, 1/2]."""
    th = theta_hat()
    if not th - 1e-9 <= theta <= 0.5 + 1e-9:
        raise DomainError(f"w_minus_sq needs theta in [{th:.6f}, 0.5], got {theta}")
    if abs(theta - 0.5) <= THETA_SNAP:
        return math.pi ** 2 / 4.0 + 1.0
    if abs(theta - th) <= THETA_SNAP:
        return u_of(th) ** 2
    return _smallest_w_root(theta, plus=False)


@lru_cache(maxsize=4096)
def w_plus_sq(theta: float) -> float:
    """Smallest c^2 grazing the interior minimum (HIGH branch), theta in [1/4, theta_hat]."""
    th = theta_hat()
    if not 0.25 - 1e-9 <= theta <= th + 1e-9:
        raise DomainError(f"w_plus_sq needs theta in [0.25, {th:.6f}], got {theta}")
    if abs(theta - 0.25) <= THETA_SNAP:
        return 1.0
    if abs(theta - th) <= THETA_SNAP:
        return u_of(th) ** 2
    return _smallest_w_root(theta, plus=True)


# --------------------------------------------------------------------------
# region definitions

def region_R(theta: float, c: float) -> RegionVerdict:
    """Existence of the LOW-branch orbit by the closed-form clauses."""
    if not 0.0 <= theta < 1.0 + 1e-12 or c < 0.0:
        raise DomainError(f"need theta in [0,1) and c >= 0, got ({theta}, {c})")
    th = _snap_theta(theta)
    c2 = c * c
    if th in (0.0, 0.5):
        bound = math.pi ** 2 / 4.0 + 1.0
        m = c2 - bound
        return RegionVerdict(m >= 0.0, _in_S(th, c2)[0], "R.i", m)
    if th == 0.25:
        return RegionVerdict(c2 > 0.0, _in_S(th, c2)[0], "R.ii", c2)
    if th < 0.5:
        thm = th if th > 0.25 else 0.5 - th
        if thm > theta_hat():
            bound, binding = w_minus_sq(thm), "R.iii"
        else:
            bound, binding = u_of(thm) ** 2, "R.iv"
        m = c2 - bound
        return RegionVerdict(m >= 0.0, _in_S(th, c2)[0], binding, m)
    vv = v_of(th)
    sn, cs = math.sin(TWO_PI * th), math.cos(TWO_PI * th)
    bound = vv * vv + ((math.pi / 2.0 + vv * cs) / sn) ** 2
    m = c2 - bound
    return RegionVerdict(m >= 0.0, False, "R.vi", m)


def _in_S(theta: float, c2: float):
    th_hat = theta_hat()
    lo_dom = 0.5 - th_hat
    if theta < lo_dom - 1e-9 or theta > th_hat + 1e-9:
        return False, "S.domain", -math.inf
    thm = theta if theta >= 0.25 else 0.5 - theta
    thm = min(thm, th_hat)
    lo = u_of(thm) ** 2
    hi = w_plus_sq(thm)
    m_lo, m_hi = c2 - lo, hi - c2
    if m_lo <= m_hi:
        return m_lo >= 0.0, "S.lower", m_lo
    return m_hi >= 0.0, "S.upper", m_hi


def region_S(theta: float, c: float) -> RegionVerdict:
    """Existence of the HIGH-branch orbit: u^2 <= c^2 <= w_+^2 near theta = 1/4."""
    if not 0.0 <= theta < 1.0 + 1e-12 or c < 0.0:
        raise DomainError(f"need theta in [0,1) and c >= 0, got ({theta}, {c})")
    th = _snap_theta(theta)
    ok, binding, margin = _in_S(th, c * c)
    return RegionVerdict(region_R(theta, c).in_R, ok, binding, margin)


def classify_subregion(theta: float, c: float) -> Subregion:
    """PLAIN / II / I for the LOW branch on theta in (0, 1/2).

    Region II is where the rising piece develops the extra extrema pair,
    i.e. t2 < alpha + theta; region I is the subset where the minimum
    crosses zero (c^2 < w_-^2).
    """
    th = _snap_theta(theta)
    if not 0.0 < th < 0.5:
        raise DomainError(f"subregions defined for theta in (0, 1/2), got {theta}")
    thm = th if th >= 0.25 else 0.5 - th
    phase = solve_phase(ModelParams(c=c, tau=thm), Branch.LOW)   # raises if no phase
    if c <= 1.0:
        return Subregion.PLAIN
    t2 = 1.0 - math.acos(-1.0 / c) / TWO_PI
    if not t2 < phase.alpha + thm:
        return Subregion.PLAIN
    if thm > theta_hat() and c * c < w_minus_sq(thm):
        return Subregion.I
    return Subregion.II


# --------------------------------------------------------------------------
# orbit construction with double-entry validity

def build_orbit(params: ModelParams, branch: Branch) -> OrbitProfile:
    """Construct the candidate orbit and decide validity twice over."""
    dec = params.decomp
    theta = _snap_theta(dec.theta)
    phase = solve_phase(params, branch)
    alpha, c = phase.alpha, params.c
    pieces = _pieces_for(theta, alpha, c)

    t1, t2 = _interior_extrema(c)
    profile = OrbitProfile(params, phase, pieces, Validity.VALID, "",
                           OrbitShape(t1, t2, None, Subregion.PLAIN))

    # numeric positivity over (alpha, alpha + 1/2): uniform samples plus the
    # analytic critical points and slope kinks
    ts = alpha + np.linspace(0.0, 0.5, 1002)[1:-1]
    extra = []
    for kink in (alpha + theta, alpha + theta - 0.5, alpha + theta + 0.5):
        if alpha < kink < alpha + 0.5:
            extra.append(kink)
    if t1 is not None:
        for t_c in (t1, t2):
            r = (t_c - alpha) % 1.0
            if 0.0 < r < 0.5:
                extra.append(alpha + r)
    if extra:
        ts = np.concatenate([ts, extra])
    hv = profile.value(ts)
    h_min = float(hv.min())
    numeric_valid = h_min >= -POSITIVITY_EPS
    grazing = numeric_valid and h_min <= POSITIVITY_EPS and c > 0

    h_at_t2 = None
    if t2 is not None:
        r = (t2 - alpha) % 1.0
        if 0.0 < r < 0.5:
            h_at_t2 = float(profile.value(alpha + r))

    verdict = region_R(theta, c) if branch is Branch.LOW else region_S(theta, c)
    in_region = verdict.in_R if branch is Branch.LOW else verdict.in_S
    if in_region != numeric_valid and abs(verdict.margin) > DOUBLE_ENTRY_MARGIN:
        raise InternalInconsistency(
            f"definition says in_region={in_region} ({verdict.binding_constraint}, "
            f"margin {verdict.margin:.3e}) but profile min is {h_min:.3e} "
            f"at (theta={theta}, c={c}, {branch.value})")

    if branch is Branch.LOW:
        if theta == 0.0 or theta == 0.5:
            sub = Subregion.PLAIN if in_region else Subregion.III
        elif theta < 0.5:
            sub = classify_subregion(theta, c)
        else:
            sub = Subregion.PLAIN if numeric_valid else Subregion.III
    else:
        if c > 1.0 and t2 is not None:
            sub = Subregion.II if numeric_valid else Subregion.I
        else:
            sub = Subregion.PLAIN if numeric_valid else Subregion.I

    shape = OrbitShape(t1, t2, h_at_t2, sub)
    if not numeric_valid and not in_region:
        validity, reason = Validity.INVALID, (
            f"profile dips to {h_min:.3e} on (alpha, alpha+1/2); "
            f"outside region ({verdict.binding_constraint}, margin {verdict.margin:.3e})")
    elif not numeric_valid or not in_region:
        # inside the double-entry margin: boundary case
        validity, reason = Validity.VALID_DEGENERATE, "on a region boundary"
    elif grazing or phase.degenerate:
        validity = Validity.VALID_DEGENERATE
        reason = "fold locus" if phase.degenerate else "grazing zeros"
    else:
        validity, reason = Validity.VALID, ""
    return OrbitProfile(params, phase, pieces, validity, reason, shape)
