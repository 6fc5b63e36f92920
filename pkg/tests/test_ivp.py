import math

import numpy as np
import pytest

from psgzt import (ConstantSign, ModelParams, PiecewiseLinear, detect_period,
                   solve_bruteforce, solve_exact)
from psgzt.errors import DomainError, InvalidInitialFunction, TooShort
from psgzt.ivp import Direction

from conftest import sample_low_params

NEG_START = ConstantSign(-1, 0.0)


def test_canonical_first_window():
    traj = solve_exact(NEG_START, ModelParams(c=1.0, tau=0.25), 2.0)
    assert traj.value(0.25) == pytest.approx(0.25 + 1.0 / (2 * math.pi), abs=1e-14)
    zs = [z for z in traj.zeros if not z.degenerate]
    assert zs[0].t == 0.0 and zs[0].direction is Direction.UP
    assert zs[1].t == pytest.approx(0.5, abs=1e-12)
    assert zs[1].direction is Direction.DOWN


def test_autonomous_triangle_wave():
    traj = solve_exact(NEG_START, ModelParams(c=0.0, tau=1.0), 12.0)
    zs = traj.zero_times
    assert np.allclose(zs, np.arange(0.0, 12.0, 2.0), atol=1e-12)
    for t_peak, val in ((1.0, 1.0), (3.0, -1.0), (5.0, 1.0), (7.0, -1.0)):
        assert traj.value(t_peak) == pytest.approx(val, abs=1e-9)
    assert traj.max_abs() == pytest.approx(1.0, abs=1e-9)
    assert detect_period(traj, 0.0) == 4


def test_history_sign_pattern_is_mirrored():
    # one declared sign change at -0.4: slope flips at t = -0.4 + tau = 0.6
    phi = PiecewiseLinear(breakpoints=[(-1.0, -0.5), (-0.4, 0.0), (0.0, 0.6)],
                          zeros=[-0.4])
    traj = solve_exact(phi, ModelParams(c=0.5, tau=1.0), 0.9)
    assert traj.segments[0].slope == +1
    assert traj.segments[0].t_end == pytest.approx(0.6, abs=1e-12)
    assert traj.segments[1].slope == -1


def test_invalid_initial_functions():
    with pytest.raises(InvalidInitialFunction):
        solve_exact(ConstantSign(-1, 0.5), ModelParams(c=1.0, tau=1.0), 2.0)
    with pytest.raises(InvalidInitialFunction):
        solve_exact(ConstantSign(2, 0.0), ModelParams(c=1.0, tau=1.0), 2.0)
    with pytest.raises(InvalidInitialFunction):
        # breakpoints do not span [-tau, 0]
        solve_exact(PiecewiseLinear([(-0.5, -1.0), (0.0, -0.2)]),
                    ModelParams(c=1.0, tau=1.0), 2.0)
    with pytest.raises(InvalidInitialFunction):
        # sign change not declared
        solve_exact(PiecewiseLinear([(-1.0, -1.0), (-0.5, 1.0), (0.0, -1.0)]),
                    ModelParams(c=1.0, tau=1.0), 2.0)


def test_bruteforce_requires_small_step():
    with pytest.raises(DomainError):
        solve_bruteforce(NEG_START, ModelParams(c=1.0, tau=0.5), 2.0, dt=1e-3)


def test_bruteforce_triangle_amplitude():
    dt = 1e-4
    br = solve_bruteforce(NEG_START, ModelParams(c=0.0, tau=1.0), 12.0, dt)
    peaks = np.abs(br.value(np.arange(1.0, 12.0, 2.0)))
    assert np.all(np.abs(peaks - 1.0) < dt * 1.0 + 1e-12)


def test_oracle_equivalence_random(rng):
    for _ in range(20):
        p = sample_low_params(rng, tau_range=(0.1, 3.0), c_span=2.0)
        # any c in [0.2, 3] regardless of orbit existence
        c = float(rng.uniform(0.2, 3.0))
        p = ModelParams(c=c, tau=p.tau)
        ex = solve_exact(NEG_START, p, 10.0)
        br = solve_bruteforce(NEG_START, p, 10.0, 1e-5)
        gap = float(np.abs(ex.value(br.t) - br.h).max())
        assert gap < 1e-3, (p, gap)
        ex.check_zero_invariants()


def test_boundedness(rng):
    for _ in range(15):
        c = float(rng.uniform(0.0, 3.5))
        tau = float(rng.uniform(0.05, 3.0))
        phi0 = -float(rng.uniform(0.0, 2.0))
        traj = solve_exact(ConstantSign(-1, phi0), ModelParams(c=c, tau=tau), 15.0)
        bound = abs(phi0) + tau + c / math.pi + (2 * tau + c / (2 * math.pi))
        assert traj.max_abs() <= bound + 1e-9


def test_restart_reproduces(rng):
    for _ in range(5):
        p = sample_low_params(rng, tau_range=(0.15, 2.0))
        full = solve_exact(NEG_START, p, 16.0)
        T = 8.0
        again = solve_exact(full.history(T), p, T + 5.0, t0=T)
        ts = np.linspace(T, T + 5.0, 2001)
        err = float(np.abs(again.value(ts) - full.value(ts)).max())
        assert err < 1e-9, (p, err)


def test_detect_period_fig2():
    p1 = solve_exact(NEG_START, ModelParams(c=1.0, tau=0.25), 60.0)
    assert detect_period(p1, 36.0) == 1
    p3 = solve_exact(NEG_START, ModelParams(c=1.0, tau=0.76), 60.0)
    assert detect_period(p3, 36.0) == 3
    pn = solve_exact(NEG_START, ModelParams(c=1.0, tau=0.508), 100.0)
    assert detect_period(pn, 60.0) is None


def test_detect_period_too_short():
    traj = solve_exact(NEG_START, ModelParams(c=1.0, tau=0.25), 12.0)
    with pytest.raises(TooShort):
        detect_period(traj, 8.0)


def test_zero_alternation_and_spacing(rng):
    for _ in range(10):
        c = float(rng.uniform(0.2, 3.0))
        tau = float(rng.uniform(0.1, 3.0))
        traj = solve_exact(NEG_START, ModelParams(c=c, tau=tau), 14.0)
        traj.check_zero_invariants()
