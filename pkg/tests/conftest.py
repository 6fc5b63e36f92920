import numpy as np
import pytest

from psgzt import Branch, ModelParams, region_R, region_S, theta_hat
from psgzt.model import delay_decomp


def low_existence_c2(theta: float) -> float:
    """c^2 threshold above which the LOW-branch orbit exists at this theta."""
    return 1.0 - region_R(theta, 1.0).margin


def sample_low_params(rng: np.random.Generator, tau_range=(0.1, 3.0),
                      c_span=2.0, margin=0.05, half_int_gap=2e-3) -> ModelParams:
    """Random (tau, c) with a strictly valid LOW orbit, away from j/2 delays."""
    while True:
        tau = rng.uniform(*tau_range)
        if abs(tau * 2.0 - round(tau * 2.0)) < 2.0 * half_int_gap:
            continue
        theta = delay_decomp(tau).theta
        c2min = low_existence_c2(theta)
        c = np.sqrt(c2min + margin) + rng.uniform(0.0, c_span)
        return ModelParams(c=float(c), tau=float(tau))


def sample_s_interior(rng: np.random.Generator, k_max=2, margin=0.02) -> ModelParams:
    """Random point strictly inside the HIGH-branch existence region."""
    from psgzt import w_plus_sq
    from psgzt.model import u_of
    th_hat = theta_hat()
    while True:
        theta = rng.uniform(0.5 - th_hat + 0.01, th_hat - 0.01)
        thm = theta if theta >= 0.25 else 0.5 - theta
        lo, hi = u_of(thm) ** 2, w_plus_sq(thm)
        if hi - lo < 2.5 * margin:
            continue
        c2 = rng.uniform(lo + margin, hi - margin)
        k = int(rng.integers(0, k_max + 1))
        tau = k + theta
        if abs(tau * 2.0 - round(tau * 2.0)) < 4e-3:
            continue
        return ModelParams(c=float(np.sqrt(c2)), tau=float(tau))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
