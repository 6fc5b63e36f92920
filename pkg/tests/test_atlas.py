import math
import time

import numpy as np
import pytest

from psgzt import (Branch, ModelParams, boundary_c_at, char_poly,
                   general_j_branches, signum_forced_boundary, sn_curve,
                   spectrum, stability_boundary_B, sweep, theta_hat,
                   torus_curve_T, u_of, w_minus_sq)
from psgzt.atlas import (bc_curves, boundary_rho_at, hprime_for_j, open_grid,
                         secondary_boundary_js, valid_j_set)
from psgzt.errors import DomainError, InvalidJ, NoTorusBranch

TWO_PI = 2.0 * math.pi


def test_torus_curve_exact_points():
    s = torus_curve_T(0, True, thetas=[0.75])[0]
    assert abs(s.c - 3.0) < 1e-12 and s.rho == pytest.approx(1.0 / 3.0)
    s = torus_curve_T(1, False, thetas=[0.25])[0]
    assert abs(s.c - math.sqrt(5.0)) < 1e-12 and s.rho == pytest.approx(0.2)
    s = torus_curve_T(1, True, thetas=[0.75])[0]
    assert s.c == pytest.approx(5.493959207434934, abs=1e-12)
    assert s.rho == pytest.approx(1.0 / 7.0)


def test_torus_curve_errors():
    with pytest.raises(NoTorusBranch):
        torus_curve_T(0, False)
    with pytest.raises(DomainError):
        torus_curve_T(1, False, thetas=[0.7])


def test_sn_curve():
    s = sn_curve(thetas=[0.36])[0]
    assert s.c == pytest.approx(0.22 * math.pi, abs=1e-14)
    assert sn_curve(thetas=[0.25])[0].c == 0.0
    th = theta_hat()
    end = sn_curve(thetas=[th])[0]
    assert end.c == pytest.approx(math.sqrt(w_minus_sq(th)), abs=1e-8)


def test_bc_curves_cover_both_arcs():
    samples = bc_curves(points=20)
    ids = {s.curve_id for s in samples}
    assert ids == {"BC_minus", "BC_plus"}
    th = theta_hat()
    for s in samples:
        if s.curve_id == "BC_minus":
            thm = s.tau if s.tau >= 0.25 else 0.5 - s.tau
            assert s.c == pytest.approx(math.sqrt(w_minus_sq(thm)), abs=1e-9)


def test_valid_j_sets():
    assert valid_j_set(1, False) == [1]
    assert valid_j_set(2, False) == [1, 4]
    assert valid_j_set(4, False) == [1, 4, 5, 8]
    assert valid_j_set(1, True) == [1, 2]
    assert valid_j_set(4, True) == [1, 2, 5, 6, 9]


def test_general_j_branch_k2():
    h = hprime_for_j(2, False, 4)
    assert h == pytest.approx(1.0 / math.cos(2.0 * math.pi / 9.0), abs=1e-14)
    # restrict to delays where the orbit itself exists (the branch exits the
    # existence region near the half-interval ends)
    samples = general_j_branches(2, False, 4)(np.linspace(0.08, 0.45, 7))
    for s in samples:
        sp = spectrum(char_poly(ModelParams(c=s.c, tau=s.tau), Branch.LOW))
        target_angle = TWO_PI * 4.0 / 9.0
        pair = [z for z in sp.roots if z.imag > 0 and abs(abs(z) - 1.0) < 1e-8]
        assert pair and min(abs(np.angle(z) - target_angle) for z in pair) < 1e-8


def test_general_j1_reproduces_torus_curve():
    thetas = open_grid(0.0, 0.5, 9)
    a = general_j_branches(1, False, 1)(thetas)
    b = torus_curve_T(1, False, thetas=thetas)
    for s1, s2 in zip(a, b):
        assert s1.c == pytest.approx(s2.c, abs=1e-13)


def test_invalid_j():
    with pytest.raises(InvalidJ):
        general_j_branches(0, True, 2)     # j <= 2k+1 = 1
    with pytest.raises(InvalidJ):
        general_j_branches(1, False, 4)    # j <= 2k = 2
    with pytest.raises(InvalidJ):
        general_j_branches(2, False, 2)    # wrong residue


def test_secondary_boundary_selection():
    assert secondary_boundary_js(1, True) == [2]
    assert secondary_boundary_js(2, False) == [4]
    assert secondary_boundary_js(2, True) == [5, 2]
    assert secondary_boundary_js(1, False) == []


def test_signum_forced_boundary():
    assert signum_forced_boundary(1, False).c == pytest.approx(math.sqrt(5.0), abs=1e-12)
    assert signum_forced_boundary(0, True).c == pytest.approx(3.0, abs=1e-12)
    # coincides with the torus curve where u or v vanishes
    assert signum_forced_boundary(1, True).c == pytest.approx(
        torus_curve_T(1, True, thetas=[0.75])[0].c, abs=1e-12)


def test_stability_boundary_composite():
    samples = stability_boundary_B([0.36, 0.75, 1.25])
    by_tau = {round(s.tau, 2): s for s in samples if s.curve_id != "B_vertical"}
    assert by_tau[0.36].curve_id == "SN"
    assert by_tau[0.36].c == pytest.approx(abs(u_of(0.36)), abs=1e-14)
    assert by_tau[0.75].curve_id == "T"
    assert by_tau[0.75].c == pytest.approx(3.0, abs=1e-12)
    assert by_tau[1.25].curve_id == "T"
    assert by_tau[1.25].c == pytest.approx(math.sqrt(5.0), abs=1e-12)
    verts = [s for s in samples if s.curve_id == "B_vertical"]
    assert {s.tau for s in verts} == {0.5, 1.0}


def test_boundary_continuity_at_theta_hat():
    th = theta_hat()
    assert boundary_c_at(th - 1e-9) == pytest.approx(boundary_c_at(th + 1e-9), abs=1e-7)
    assert boundary_c_at(th) == pytest.approx(u_of(th), abs=1e-9)


def test_spectrum_on_torus_curve():
    for k in range(4):
        for upper in (False, True):
            if k == 0 and not upper:
                continue
            rho = 1.0 / (4 * k + 3) if upper else 1.0 / (4 * k + 1)
            for s in torus_curve_T(k, upper, points=10):
                sp = spectrum(char_poly(ModelParams(c=s.c, tau=s.tau), Branch.LOW))
                pair = [z for z in sp.roots if z.imag > 0]
                best = min(pair, key=lambda z: abs(abs(z) - 1.0))
                assert abs(abs(best) - 1.0) < 1e-8, (k, upper, s.tau)
                assert abs(np.angle(best) - TWO_PI * rho) < 1e-8


def test_sn_curve_multiplier_at_one():
    for th in np.linspace(0.5 - theta_hat() + 1e-3, theta_hat() - 1e-3, 8):
        c = abs(u_of(float(th)))   # theta = 1/4 (c = 0) is excluded by the grid
        sp = spectrum(char_poly(ModelParams(c=c, tau=float(th)), Branch.LOW))
        assert min(abs(z - 1.0) for z in sp.roots) < 1e-10


def test_rotation_staircase():
    rhos = [boundary_rho_at(t) for t in (0.75, 1.25, 1.75, 2.25, 2.75)]
    assert rhos == [pytest.approx(x) for x in (1/3, 1/5, 1/7, 1/9, 1/11)]
    assert all(b < a for a, b in zip(rhos, rhos[1:]))


def test_two_steps_forward_pattern():
    def seg_max(k, upper):
        w2 = math.pi ** 2 / 4.0   # sup of u^2 / v^2 on the open half-interval
        if upper:
            amp = 1.0 / math.sin(math.pi / (2 * (4 * k + 3))) + 1.0
        else:
            amp = 1.0 / math.sin(math.pi / (2 * (4 * k + 1))) - 1.0
        return math.sqrt(amp * amp + w2)

    for k in range(1, 5):
        assert seg_max(k, True) > seg_max(k, False)          # rise across k + 1/2
        assert seg_max(k + 1, False) < seg_max(k, True)      # small drop across k + 1
        assert seg_max(k + 1, False) > seg_max(k, False)
        assert seg_max(k + 1, True) > seg_max(k, True)


def test_sweep_small_grid_and_determinism():
    taus = np.linspace(0.6, 1.4, 5)
    cs = np.linspace(0.5, 4.0, 5)
    rows = sweep(taus, cs)
    assert len(rows) == 25
    assert rows == sorted(rows, key=lambda r: (r["tau"], r["c"]))
    again = sweep(taus, cs)
    assert rows == again
    r = [x for x in rows if abs(x["tau"] - 0.8) < 1e-12 and abs(x["c"] - 4.0) < 1e-12][0]
    assert r["verdict"] == "stable" and r["in_R"] == 1


def test_sweep_handles_errors_inline():
    rows = sweep([1.5], [2.0, 5.0])     # half-integer delay: floquet refused
    assert all(r["error"] == "HalfIntegerDelay" for r in rows)
    assert sweep([], []) == []


def test_sweep_verdict_flip_matches_closed_form():
    c_t = boundary_c_at(1.75)
    lo, hi = c_t - 0.2, c_t + 0.2
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        sp = spectrum(char_poly(ModelParams(c=mid, tau=1.75), Branch.LOW))
        if sp.max_modulus < 1.0:
            hi = mid
        else:
            lo = mid
    assert 0.5 * (lo + hi) == pytest.approx(c_t, abs=1e-6)


def test_sweep_performance_100x100():
    taus = np.linspace(0.1, 3.0, 100)
    cs = np.linspace(0.1, 6.0, 100)
    t0 = time.time()
    rows = sweep(taus, cs)
    elapsed = time.time() - t0
    assert len(rows) == 10000
    assert elapsed < 60.0, f"sweep took {elapsed:.1f}s"
