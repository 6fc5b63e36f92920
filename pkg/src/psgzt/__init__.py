"""Exact solver and bifurcation atlas for the piecewise-smooth GZT delayed oscillator

    h'(t) = -sign(h(t - tau)) + c*cos(2*pi*t)

with its smooth tanh(kappa .) companion as a numerical cross-check.
"""

__version__ = "0.1.0"

from .model import (Branch, DelayDecomp, HalfBranch, ModelParams,
                    PhaseSolution, delay_decomp, solve_phase, u_of, v_of)
from .ivp import (ConstantSign, PiecewiseLinear, SegmentHistory,
                  PiecewiseTrajectory, detect_period, solve_bruteforce,
                  solve_exact)
from .orbits import (OrbitProfile, RegionVerdict, Subregion, Validity,
                     build_orbit, classify_subregion, region_R, region_S,
                     theta_hat, w_minus_sq, w_plus_sq)
from .floquet import (CharPoly, FloquetSpectrum, Verdict, char_poly,
                      power_iteration_check, spectrum)
from .atlas import (CurveSample, bc_curves, boundary_c_at, general_j_branches,
                    signum_forced_boundary, sn_curve, stability_boundary_B,
                    sweep, torus_curve_T)
from .smooth import (SmoothParams, classify_period1, integrate_smooth,
                     orbit_seed_history, smooth_boundary_bisect,
                     smooth_rotation_estimate)

__all__ = [name for name in dir() if not name.startswith("_")]
