"""Parameters, elementary phase functions, and the phase equation.

The oscillator is h'(t) = -sign(h(t - tau)) + c*cos(2*pi*t). Writing
tau = k + theta with integer k >= 0 and theta in [0, 1), a symmetric
period-one orbit with a single upward zero at t = alpha must satisfy

    c*sin(2*pi*alpha) = u(theta) := pi*(2*theta - 1/2)     theta in [0, 1/2)
    c*sin(2*pi*alpha) = v(theta) := pi*(3/2 - 2*theta)     theta in [1/2, 1)

which leaves two candidate phases per theta: cos(2*pi*alpha) >= 0 (branch
LOW, alpha in [-1/4, 1/4] mod 1) and cos(2*pi*alpha) <= 0 (branch HIGH,
alpha in [1/4, 3/4] mod 1). The orbit slope at the upward zero is

    h'(alpha) = 1 + c*cos(2*pi*alpha)    theta in (0, 1/2)
    h'(alpha) = -1 + c*cos(2*pi*alpha)   theta in (1/2, 1)

with one-sided values at theta in {0, 1/2} where the zero coincides with a
slope discontinuity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import BranchUnavailable, DomainError, InsufficientForcing

TWO_PI = 2.0 * math.pi

# tolerance for snapping theta to {0, 1/2, 1}; callers decide how to treat
# flagged half-integer delays
BOUNDARY_BAND = 1e-9


class Branch(enum.Enum):
    LOW = "low"    # alpha in [-1/4, 1/4] mod 1, cos(2*pi*alpha) >= 0
    HIGH = "high"  # alpha in [1/4, 3/4] mod 1, cos(2*pi*alpha) <= 0


class HalfBranch(enum.Enum):
    INTEGER = "{0}"
    LOWER = "(0,1/2)"
    HALF = "{1/2}"
    UPPER = "(1/2,1)"


@dataclass(frozen=True)
class ModelParams:
    """Forcing amplitude c >= 0 and delay tau > 0."""

    c: float
    tau: float

    def __post_init__(self) -> None:
        if not (self.c >= 0.0) or not math.isfinite(self.c):
            raise DomainError(f"c must be finite and >= 0, got {self.c}")
        if not (self.tau > 0.0) or not math.isfinite(self.tau):
            raise DomainError(f"tau must be finite and > 0, got {self.tau}")

    @property
    def decomp(self) -> "DelayDecomp":
        return delay_decomp(self.tau)


@dataclass(frozen=True)
class DelayDecomp:
    """tau = k + theta with k integer >= 0 and theta in [0, 1)."""

    k: int
    theta: float
    half_branch: HalfBranch
    boundary: bool  # theta within BOUNDARY_BAND of {0, 1/2, 1}


def delay_decomp(tau: float) -> DelayDecomp:
    """Split tau into integer and fractional parts and classify the half-interval."""
    if not (tau > 0.0) or not math.isfinite(tau):
        raise DomainError(f"tau must be finite and > 0, got {tau}")
    k = int(math.floor(tau))
    theta = tau - k
    if theta < BOUNDARY_BAND:
        return DelayDecomp(k, theta, HalfBranch.INTEGER, boundary=True)
    if theta > 1.0 - BOUNDARY_BAND:
        # tau just below an integer; classified with the integer case
        return DelayDecomp(k, theta, HalfBranch.INTEGER, boundary=True)
    if abs(theta - 0.5) <= BOUNDARY_BAND:
        return DelayDecomp(k, theta, HalfBranch.HALF, boundary=True)
    if theta < 0.5:
        return DelayDecomp(k, theta, HalfBranch.LOWER, boundary=False)
    return DelayDecomp(k, theta, HalfBranch.UPPER, boundary=False)


def u_of(theta: float) -> float:
    """u(theta) = pi*(2*theta - 1/2) on [0, 1/2]."""
    if not -1e-12 <= theta <= 0.5 + 1e-12:
        raise DomainError(f"u(theta) needs theta in [0, 1/2], got {theta}")
    return math.pi * (2.0 * theta - 0.5)


def v_of(theta: float) -> float:
    """v(theta) = pi*(3/2 - 2*theta) on [1/2, 1]; v(theta) = u(1 - theta)."""
    if not 0.5 - 1e-12 <= theta <= 1.0 + 1e-12:
        raise DomainError(f"v(theta) needs theta in [1/2, 1], got {theta}")
    return math.pi * (1.5 - 2.0 * theta)


@dataclass(frozen=True)
class PhaseSolution:
    """Phase alpha of a candidate 1:1 orbit, normalized to (-1/2, 1/2]."""

    alpha: float
    branch: Branch
    sin2pa: float
    cos2pa: float
    hprime_alpha: float
    one_sided: bool    # theta in {0, 1/2}: the stored slope is the right-hand value
    degenerate: bool   # fold locus c^2 = u^2(theta): both branches coincide, h'(alpha) = 1
    theta: float
    c: float


def solve_phase(params: ModelParams, branch: Branch) -> PhaseSolution:
    """Solve the phase equation for the requested branch.

    Raises InsufficientForcing when c^2 < u^2(theta) (resp. v^2), and
    BranchUnavailable for HIGH outside theta in (0, 1/2).
    """
    dec = params.decomp
    theta, c = dec.theta, params.c
    at_zero = dec.half_branch is HalfBranch.INTEGER
    at_half = dec.half_branch is HalfBranch.HALF
    if at_zero:
        theta = 0.0
    elif at_half:
        theta = 0.5

    lower = theta < 0.5  # phase equation uses u on [0, 1/2), v on [1/2, 1)
    target = u_of(theta) if lower else v_of(theta)

    if branch is Branch.HIGH and (not lower or at_zero):
        raise BranchUnavailable(
            f"HIGH branch requires theta in (0, 1/2); theta = {theta}")

    if c == 0.0:
        raise InsufficientForcing("c = 0: phase equation has no solution")
    disc = c * c - target * target
    if disc < 0.0:
        if disc > -32.0 * math.ulp(max(c * c, 1.0)):
            disc = 0.0  # fold locus reached up to rounding
        else:
            raise InsufficientForcing(
                f"c^2 = {c*c:.6g} < {'u' if lower else 'v'}^2(theta) = {target*target:.6g}")

    sin2pa = target / c
    root = math.sqrt(disc) / c
    cos2pa = root if branch is Branch.LOW else -root
    alpha = math.atan2(sin2pa, cos2pa) / TWO_PI  # representative in (-1/2, 1/2]

    if at_zero:
        hprime = -1.0 + c * cos2pa       # right-hand slope: h > 0 just after alpha
    elif at_half:
        hprime = 1.0 + c * cos2pa        # right-hand slope: h < 0 on (alpha - 1/2, alpha)
    elif lower:
        hprime = 1.0 + c * cos2pa
    else:
        hprime = -1.0 + c * cos2pa

    return PhaseSolution(
        alpha=alpha, branch=branch, sin2pa=sin2pa, cos2pa=cos2pa,
        hprime_alpha=hprime, one_sided=at_zero or at_half,
        degenerate=(disc == 0.0), theta=theta, c=c)
