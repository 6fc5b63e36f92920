import math

import numpy as np
import pytest

from psgzt import (SmoothParams, boundary_c_at, classify_period1,
                   integrate_smooth, orbit_seed_history,
                   smooth_boundary_bisect, smooth_rotation_estimate)
from psgzt.errors import DomainError, NotOscillatory, SameClassAtBracket
from psgzt.smooth import ClassifySettings

TWO_PI = 2.0 * math.pi


def _integrate_naive(kappa, c, tau, hist, t_end, dt):
    """Step-by-step reference for the blocked integrator (same scheme)."""
    n = int(round(t_end / dt))
    h = np.empty(n + 1)
    f = np.empty(n + 1)
    h[0] = float(hist(0.0))

    def delayed(tq):
        if tq <= 0.0:
            return float(hist(tq))
        x = tq / dt
        j = int(math.floor(x))
        s = x - j
        s2, s3 = s * s, s ** 3
        return ((2 * s3 - 3 * s2 + 1) * h[j] + (s3 - 2 * s2 + s) * dt * f[j]
                + (-2 * s3 + 3 * s2) * h[j + 1] + (s3 - s2) * dt * f[j + 1])

    def F(tq, filled):
        return -math.tanh(kappa * delayed(tq - tau)) + c * math.cos(TWO_PI * tq)

    f[0] = F(0.0, 0)
    for i in range(n):
        t = i * dt
        fl = f[i]
        fm = F(t + 0.5 * dt, i)
        fr = F(t + dt, i)
        h[i + 1] = h[i] + dt / 6.0 * (fl + 4.0 * fm + fr)
        f[i + 1] = fr
    return h


def test_blocked_integrator_matches_reference():
    kappa, c, tau = 33.0, 2.0, 0.8
    hist = orbit_seed_history(c, tau, perturb=1e-3)
    dt = 1e-3
    got = integrate_smooth(SmoothParams(kappa, c, tau), hist, 6.0, dt)
    ref = _integrate_naive(kappa, c, tau, hist, 6.0, dt)
    assert np.abs(got.h - ref).max() < 1e-9


def test_parameter_validation():
    with pytest.raises(DomainError):
        SmoothParams(0.5, 1.0, 0.8)
    with pytest.raises(DomainError):
        SmoothParams(500.0, 1.0, 0.8)
    with pytest.raises(DomainError):
        integrate_smooth(SmoothParams(33.0, 1.0, 0.01), orbit_seed_history(1.0, 0.01), 1.0, 1e-3)


def test_classification_examples():
    # above the boundary: period-one convergence
    assert classify_period1(SmoothParams(33.0, 4.0, 0.8))
    # below: no convergence
    assert not classify_period1(SmoothParams(33.0, 1.0, 0.8))


def test_irregular_regime_kappa50():
    # no period-one convergence in the weak-forcing irregular regime
    short = ClassifySettings(transient=40, horizon=120)
    assert not classify_period1(SmoothParams(50.0, 1.0, 0.42), settings=short)


def test_bracket_validation():
    with pytest.raises(SameClassAtBracket):
        smooth_boundary_bisect(33.0, 0.8, 3.5, 4.5)   # both stable


def test_boundary_near_fold_small_tau():
    est = smooth_boundary_bisect(33.0, 0.36, 0.45, 1.0)
    target = boundary_c_at(0.36)    # fold line: c = |u(0.36)| ~= 0.691
    assert abs(est.c - target) / target < 0.15


def test_grid_refinement_stability():
    est1 = smooth_boundary_bisect(11.0, 0.75, 2.4, 3.6)
    est2 = smooth_boundary_bisect(11.0, 0.75, 2.4, 3.6,
                                  settings=ClassifySettings(dt=5e-4))
    assert abs(est1.c - est2.c) < 1e-3 + 1e-12


def test_rotation_estimates():
    b = smooth_boundary_bisect(33.0, 0.8, 2.4, 3.6).c
    r = smooth_rotation_estimate(SmoothParams(33.0, b - 0.01, 0.8))
    assert abs(r.rho - 1.0 / 3.0) < 0.02
    b2 = smooth_boundary_bisect(33.0, 1.3, 1.8, 2.8).c
    r2 = smooth_rotation_estimate(SmoothParams(33.0, b2 - 0.01, 1.3))
    assert abs(r2.rho - 0.2) < 0.02


def test_rotation_not_oscillatory_deep_interior():
    with pytest.raises(NotOscillatory):
        smooth_rotation_estimate(SmoothParams(33.0, 5.0, 0.8))
