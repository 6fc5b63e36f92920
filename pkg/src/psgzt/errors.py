"""Exception hierarchy.

DomainError covers caller mistakes (bad parameters, unavailable branches);
NumericalError covers failures of the numerics themselves. The CLI maps
DomainError to exit status 2 and NumericalError to exit status 3.
"""


class PsgztError(Exception):
    pass


class DomainError(PsgztError, ValueError):
    pass


class NumericalError(PsgztError, RuntimeError):
    pass


class InsufficientForcing(DomainError):
    """c^2 below u^2(theta) (resp. v^2): no phase solves the zero condition."""


class BranchUnavailable(DomainError):
    """Requested phase branch does not exist for this theta."""


class HalfIntegerDelay(DomainError):
    """tau within 1e-9 of j/2: Floquet analysis declined."""


class NoOrbit(DomainError):
    """No valid 1:1 orbit at these parameters."""


class DegenerateOrbit(DomainError):
    """Orbit exists only with degenerate zeros; linearization hypotheses fail."""


class NoTorusBranch(DomainError):
    """No torus bifurcation exists for this (k, half-interval)."""


class InvalidJ(DomainError):
    """j outside the valid residue set / range for this (k, half-interval)."""


class InvalidInitialFunction(DomainError):
    pass


class TooShort(DomainError):
    """Trajectory does not extend far enough for the requested analysis."""


class SameClassAtBracket(DomainError):
    """Bisection bracket endpoints classify identically."""


class NotOscillatory(DomainError):
    """Deviations decay without rotation: no rotation number to estimate."""


class AccumulationSuspected(NumericalError):
    """Two consecutive nondegenerate zeros closer than the accumulation guard."""


class ConvergenceFailure(NumericalError):
    pass


class InternalInconsistency(NumericalError):
    """Definition-based and profile-based region verdicts disagree beyond margin."""
