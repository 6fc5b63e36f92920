"""Exact event-driven solution of the delayed relay oscillator.

Between slope switches the solution is a segment

    h(t) = A + s*t + (c/2pi)*sin(2*pi*t),        s in {-1, +1},

where s = -sign(h(t - tau)) is constant on intervals of the form
(z_l + tau, z_{l+1} + tau) bounded by echoes of successive sign-change
zeros z_l. Marching therefore alternates two operations: locate every zero
of the current segment (splitting it at the closed-form critical points
cos(2*pi*t) = -s/c so each search runs on a monotone piece), and flip the
slope whenever the echo z + tau of a recorded sign change is reached.

A brute-force fixed-step midpoint integrator over the same initial data
serves as an independent oracle; it never shares the event logic.
"""

from __future__ import annotations

import enum
import heapq
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (AccumulationSuspected, DomainError,
                     InvalidInitialFunction, TooShort)
from .model import TWO_PI, ModelParams

ZERO_EPS = 1e-12      # |h| below this at a boundary counts as "at a zero"
DEGEN_EPS = 1e-10     # |h| at an interior critical point flagging degeneracy
MIN_ZERO_GAP = 1e-6   # accumulation guard between nondegenerate zeros


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class Zero:
    t: float
    direction: Direction
    degenerate: bool = False


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    slope: int      # s
    offset: float   # A

    def value(self, t, c):
        return self.offset + self.slope * np.asarray(t) + (c / TWO_PI) * np.sin(TWO_PI * np.asarray(t))


# --------------------------------------------------------------------------
# initial functions

@dataclass(frozen=True)
class ConstantSign:
    """History of constant sign on [-tau, 0), with h(0) of matching sign or 0."""

    sign: int
    value_at_0: float = 0.0


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear history on [-tau, 0] with declared sign changes."""

    breakpoints: Sequence[tuple]   # ordered (s, value) pairs spanning [-tau, 0]
    zeros: Sequence[float] = ()    # sign-change points, strictly inside (-tau, 0)


@dataclass(frozen=True)
class SegmentHistory:
    """History given by solver/orbit segments; used for restarts and orbit feeding."""

    t0: float
    h0: float
    zeros: tuple            # absolute sign-change times in (t0 - tau, t0)
    lead_sign: int          # sign of h on (t0 - tau, first zero)
    segments: tuple = ()    # optional Segment tuple for value queries
    c: float = 0.0


InitialFunction = Union[ConstantSign, PiecewiseLinear, SegmentHistory]


@dataclass
class _History:
    h0: float
    zeros: list          # absolute times in [t0 - tau, t0)
    lead_sign: int
    values: Callable     # rel-time -> value array (brute-force oracle only)


def _normalize_history(phi: InitialFunction, tau: float, t0: float) -> _History:
    if isinstance(phi, ConstantSign):
        if phi.sign not in (-1, 1):
            raise InvalidInitialFunction(f"sign must be -1 or +1, got {phi.sign}")
        v0 = float(phi.value_at_0)
        if not math.isfinite(v0) or (v0 != 0.0 and (v0 > 0) != (phi.sign > 0)):
            raise InvalidInitialFunction(
                f"value_at_0 = {v0} inconsistent with sign {phi.sign}")
        sgn = phi.sign

        def values(trel):
            out = np.full(np.shape(trel), float(sgn))
            out = np.where(np.asarray(trel) >= -1e-300, v0, out)
            return out

        return _History(v0, [], sgn, values)

    if isinstance(phi, PiecewiseLinear):
        bps = [(float(s), float(v)) for s, v in phi.breakpoints]
        if len(bps) < 2:
            raise InvalidInitialFunction("need at least two breakpoints")
        ss = [s for s, _ in bps]
        if any(b <= a for a, b in zip(ss, ss[1:])):
            raise InvalidInitialFunction("breakpoints must be strictly increasing")
        if abs(ss[0] + tau) > 1e-9 or abs(ss[-1]) > 1e-9:
            raise InvalidInitialFunction(
                f"breakpoints must span [-tau, 0] = [{-tau}, 0], got [{ss[0]}, {ss[-1]}]")
        zs = [float(z) for z in phi.zeros]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise InvalidInitialFunction("declared zeros must be strictly increasing")
        if zs and (zs[0] <= -tau + 1e-12 or zs[-1] >= -1e-12):
            raise InvalidInitialFunction("declared zeros must lie strictly inside (-tau, 0)")
        xs = np.array(ss)
        vs = np.array([v for _, v in bps])

        def values(trel):
            return np.interp(np.asarray(trel), xs, vs)

        # sign changes implied by the breakpoint values must match the declared ones
        crossings = []
        lead = 0
        prev_x = prev_v = None     # last breakpoint with |v| > 1e-12
        zero_bp = None             # zero-valued breakpoint since the last nonzero one
        for x, v in zip(xs, vs):
            if abs(v) <= 1e-12:
                zero_bp = float(x)
                continue
            s_here = 1 if v > 0 else -1
            if lead == 0:
                lead = s_here
            elif s_here != (1 if prev_v > 0 else -1):
                crossings.append(zero_bp if zero_bp is not None else
                                 prev_x - prev_v * (x - prev_x) / (v - prev_v))
            prev_x, prev_v = float(x), float(v)
            zero_bp = None
        if lead == 0:
            raise InvalidInitialFunction("history is numerically zero everywhere")
        if len(crossings) != len(zs) or any(
                abs(z - x) > 1e-9 for z, x in zip(zs, crossings)):
            raise InvalidInitialFunction(
                f"declared zeros {zs} do not match the sign changes {crossings} "
                "implied by the breakpoint values")
        return _History(float(vs[-1]), [t0 + z for z in zs], lead, values)

    if isinstance(phi, SegmentHistory):
        if phi.lead_sign not in (-1, 1):
            raise InvalidInitialFunction("lead_sign must be -1 or +1")
        zs = sorted(float(z) for z in phi.zeros)
        if any(not (phi.t0 - tau - 1e-9 <= z < phi.t0) for z in zs):
            raise InvalidInitialFunction("history zeros must lie in [t0 - tau, t0)")
        segs = tuple(phi.segments)
        cc = phi.c

        def values(trel):
            if not segs:
                raise InvalidInitialFunction("SegmentHistory without segments is not evaluable")
            t = np.asarray(trel) + t0
            starts = [s.t_start for s in segs]
            idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(segs) - 1)
            out = np.empty(np.shape(t))
            for i, s in enumerate(segs):
                m = idx == i
                if np.any(m):
                    out[m] = s.value(t[m], cc)
            return out

        return _History(float(phi.h0), zs, phi.lead_sign, values)

    raise InvalidInitialFunction(f"unsupported initial function {type(phi).__name__}")


# --------------------------------------------------------------------------
# segment zero location

def _crit_points(c: float, s: int, a: float, b: float) -> list:
    """Solutions of s + c*cos(2*pi*t) = 0 strictly inside (a, b)."""
    if c <= 1.0:
        return []
    t_star = math.acos(-s / c) / TWO_PI
    out = []
    n = math.floor(a) - 1
    while n <= b + 1:
        for tc in (n + t_star, n + 1.0 - t_star):
            if a < tc < b:
                out.append(tc)
        n += 1
    return sorted(out)


def _refine_zero(f, df, lo: float, hi: float, sign_lo: int) -> float:
    """Zero in (lo, hi] where f leaves lo with sign sign_lo and f(hi) is opposite."""
    a, b = lo, hi
    for _ in range(120):
        if b - a <= 1e-15 * max(1.0, abs(a), abs(b)):
            break
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == (sign_lo > 0):
            a = m
        else:
            b = m
    z = 0.5 * (a + b)
    for _ in range(3):
        d = df(z)
        if d != 0.0:
            zn = z - f(z) / d
            if lo <= zn <= hi:
                z = zn
    return z


def _next_zero(c, s, A, a, b, sign_a):
    """First zero of the segment in (a, b]; ('cross'|'touch', z) or (None, None).

    sign_a is the sign of h just after a; a graze within DEGEN_EPS of zero at an
    interior critical point is reported as a touch and does not change sign.
    """

    def f(t):
        return A + s * t + (c / TWO_PI) * math.sin(TWO_PI * t)

    def df(t):
        return s + c * math.cos(TWO_PI * t)

    lo = a
    for q in _crit_points(c, s, a, b) + [b]:
        fq = f(q)
        if q != b and abs(fq) < DEGEN_EPS:
            return q, "touch"
        if abs(fq) < ZERO_EPS:
            # zero essentially at the piece end; boundary handling owns it
            if q == b:
                return None, None
            lo = q
            continue
        if (fq > 0.0) != (sign_a > 0):
            return _refine_zero(f, df, lo, q, sign_a), "cross"
        lo = q
    return None, None


# --------------------------------------------------------------------------
# trajectories

@dataclass
class PiecewiseTrajectory:
    params: ModelParams
    t0: float
    t_end: float
    segments: list = field(default_factory=list)
    zeros: list = field(default_factory=list)
    initial_sign: int = -1   # sign of h just after t0 (before the first recorded zero)

    def value(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        starts = [s.t_start for s in self.segments]
        idx = np.clip(np.searchsorted(starts, t_arr, side="right") - 1, 0, len(self.segments) - 1)
        out = np.empty_like(t_arr)
        c = self.params.c
        for i in np.unique(idx):
            m = idx == i
            out[m] = self.segments[i].value(t_arr[m], c)
        return out if np.ndim(t) else float(out[0])

    @property
    def zero_times(self):
        return [z.t for z in self.zeros if not z.degenerate]

    def sign_after(self, t: float) -> int:
        """Sign of h on the interval following the last nondegenerate zero <= t."""
        sgn = self.initial_sign
        for z in self.zeros:
            if z.t > t:
                break
            if not z.degenerate:
                sgn = 1 if z.direction is Direction.UP else -1
        return sgn

    def history(self, T: float) -> SegmentHistory:
        """Induced history on [T - tau, T] for restarting the solver at T."""
        tau = self.params.tau
        if T < self.t0 + tau - 1e-12 or T > self.t_end + 1e-12:
            raise DomainError(f"history requires t0 + tau <= T <= t_end, got T={T}")
        zs = [z.t for z in self.zeros if not z.degenerate and T - tau < z.t < T]
        lead = self.sign_after(T - tau)
        starts = [s.t_start for s in self.segments]
        i0 = max(0, bisect_right(starts, T - tau) - 1)
        segs = tuple(self.segments[i0:])
        return SegmentHistory(t0=T, h0=float(self.value(T)), zeros=tuple(zs),
                              lead_sign=lead, segments=segs, c=self.params.c)

    def max_abs(self) -> float:
        """Exact max |h| over the trajectory (segment endpoints and critical points)."""
        c = self.params.c
        best = 0.0
        for s in self.segments:
            cand = [s.t_start, s.t_end] + _crit_points(c, s.slope, s.t_start, s.t_end)
            best = max(best, max(abs(float(s.value(t, c))) for t in cand))
        return best

    def check_zero_invariants(self) -> None:
        """Alternation of nondegenerate zero directions and the spacing bound.

        The gap bound is 2*tau + c/pi: after a sign change at z the running
        integral of the forcing is bounded by c/pi, and the delayed feedback
        turns against the solution at most 2*tau later. (The sharper-looking
        c/(2*pi) form seen in prose fails on real trajectories.)
        """
        nd = [z for z in self.zeros if not z.degenerate]
        for a, b in zip(nd, nd[1:]):
            if a.direction is b.direction:
                raise AssertionError(f"zeros at {a.t} and {b.t} do not alternate")
        bound = 2.0 * self.params.tau + self.params.c / math.pi + 1e-9
        for a, b in zip(nd, nd[1:]):
            if b.t - a.t > bound:
                raise AssertionError(
                    f"zero gap {b.t - a.t} exceeds 2*tau + c/pi = {bound}")


def solve_exact(phi: InitialFunction, params: ModelParams, t_end: float,
                t0: float = 0.0, require_nondegenerate_start: bool = False
                ) -> PiecewiseTrajectory:
    """March the exact solution from history phi up to t_end."""
    if not t_end > t0:
        raise DomainError(f"t_end = {t_end} must exceed t0 = {t0}")
    c, tau = params.c, params.tau
    hist = _normalize_history(phi, tau, t0)

    if require_nondegenerate_start:
        g = 1.0 + c * math.cos(TWO_PI * t0)
        if not (g > 0.0 or (g == 0.0 and math.sin(TWO_PI * t0) < 0.0)):
            raise InvalidInitialFunction(
                "start-time nondegeneracy needs 1 + c*cos(2*pi*t0) > 0")

    events: list = [z + tau for z in hist.zeros]
    heapq.heapify(events)
    nflips_hist = len(hist.zeros)
    cur_sign = hist.lead_sign * (1 if nflips_hist % 2 == 0 else -1)
    s = -hist.lead_sign
    traj = PiecewiseTrajectory(params, t0, t_end)

    t, h = t0, hist.h0
    last_zero_t = -math.inf

    def departure_sign(slope, at):
        d = slope + c * math.cos(TWO_PI * at)
        if d != 0.0:
            return 1 if d > 0 else -1
        d2 = -c * math.sin(TWO_PI * at)
        if d2 != 0.0:
            return 1 if d2 > 0 else -1
        return 1 if -c * math.cos(TWO_PI * at) > 0 else -1

    def note_zero(z, new_sign, degenerate):
        nonlocal last_zero_t, cur_sign
        if degenerate:
            direction = Direction.UP if cur_sign < 0 else Direction.DOWN
            traj.zeros.append(Zero(z, direction, True))
            return
        if z - last_zero_t < MIN_ZERO_GAP and last_zero_t > -math.inf:
            raise AccumulationSuspected(
                f"nondegenerate zeros at {last_zero_t} and {z} closer than {MIN_ZERO_GAP}")
        traj.zeros.append(Zero(z, Direction.UP if new_sign > 0 else Direction.DOWN, False))
        last_zero_t = z
        cur_sign = new_sign
        heapq.heappush(events, z + tau)

    def boundary_zero_check(at, slope):
        # a zero sitting exactly on a segment boundary (includes h(t0) = 0 starts)
        nonlocal h
        if abs(h) >= ZERO_EPS:
            return
        if traj.zeros and abs(at - traj.zeros[-1].t) < 1e-11:
            return
        h = 0.0
        dep = departure_sign(slope, at)
        note_zero(at, dep, degenerate=(dep == cur_sign))

    traj.initial_sign = cur_sign   # sign before any recorded zero
    if abs(h) < ZERO_EPS:
        boundary_zero_check(t, s)

    while t < t_end - 1e-15:
        t_stop = t_end if not events else min(t_end, events[0])
        A = h - s * t - (c / TWO_PI) * math.sin(TWO_PI * t)
        scan_from, scan_sign = t, cur_sign
        while True:
            z, kind = _next_zero(c, s, A, scan_from, t_stop, scan_sign)
            if z is None or z <= scan_from:
                break
            if kind == "cross":
                note_zero(z, -scan_sign, degenerate=False)
                scan_sign = cur_sign
                if z + tau < t_stop:
                    t_stop = z + tau
            else:
                note_zero(z, 0, degenerate=True)
            scan_from = z
        h = A + s * t_stop + (c / TWO_PI) * math.sin(TWO_PI * t_stop)
        traj.segments.append(Segment(t, t_stop, s, A))
        t = t_stop
        nflips = 0
        while events and events[0] <= t + 1e-12:
            heapq.heappop(events)
            nflips += 1
        if nflips % 2 == 1:
            s = -s
        if t < t_end - 1e-15:
            boundary_zero_check(t, s)
    return traj


# --------------------------------------------------------------------------
# brute-force oracle

@dataclass
class SampledTrajectory:
    params: ModelParams
    t: np.ndarray
    h: np.ndarray

    @property
    def t0(self):
        return float(self.t[0])

    @property
    def t_end(self):
        return float(self.t[-1])

    def value(self, tq):
        return np.interp(np.asarray(tq, dtype=float), self.t, self.h)


def solve_bruteforce(phi: InitialFunction, params: ModelParams, t_end: float,
                     dt: float, t0: float = 0.0) -> SampledTrajectory:
    """Fixed-step midpoint integration with linearly interpolated delayed sign.

    The right-hand side depends on time and the delayed value only, so each
    stretch of at most tau/dt steps reduces to a cumulative sum; the scheme is
    the plain midpoint rule regardless of that grouping. sign(0) = 0 is applied
    literally, matching the model's convention.
    """
    if not dt <= 1e-4:
        raise DomainError(f"brute-force oracle requires dt <= 1e-4, got {dt}")
    if not t_end > t0:
        raise DomainError("t_end must exceed t0")
    c, tau = params.c, params.tau
    hist = _normalize_history(phi, tau, t0)
    n = int(round((t_end - t0) / dt))
    h = np.empty(n + 1)
    h[0] = hist.h0
    block = max(1, int(math.floor(tau / dt - 0.5)))
    i = 0
    while i < n:
        m = min(block, n - i)
        tmid = t0 + (np.arange(i, i + m) + 0.5) * dt
        tq = tmid - tau
        delayed = np.empty(m)
        past = tq <= t0
        if past.any():
            delayed[past] = hist.values(tq[past] - t0)
        if (~past).any():
            pos = np.nonzero(~past)[0]
            x = (tq[pos] - t0) / dt
            j = np.floor(x).astype(int)
            fr = x - j
            delayed[pos] = h[j] * (1.0 - fr) + h[j + 1] * fr
        rhs = -np.sign(delayed) + c * np.cos(TWO_PI * tmid)
        h[i + 1:i + m + 1] = h[i] + dt * np.cumsum(rhs)
        i += m
    return SampledTrajectory(params, t0 + np.arange(n + 1) * dt, h)


# --------------------------------------------------------------------------
# stroboscopic period detection

def detect_period(traj, transient: float, tol: float = 1e-6,
                  n_max: int = 8) -> Optional[int]:
    """Smallest integer period n <= n_max of the stroboscopic samples, or None."""
    t0, t_end = traj.t0, traj.t_end
    m_hi = int(math.floor(t_end - t0 + 1e-9))
    m_lo = int(math.ceil(transient))
    if m_hi - m_lo < 10:
        raise TooShort(
            f"need at least transient + 10 periods; have {m_hi - m_lo} past the transient")
    ms = np.arange(m_lo, m_hi + 1)
    hs = np.asarray(traj.value(t0 + ms), dtype=float)
    for n in range(1, n_max + 1):
        if np.all(np.abs(hs[n:] - hs[:-n]) < tol):
            return n
    return None
