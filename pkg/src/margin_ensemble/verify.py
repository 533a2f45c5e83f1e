"""Randomized check of the analytic gradient against finite differences."""

import numpy as np

from .loss_grad import HyperParams, finite_diff_grad, sample_grad, sample_loss

REL_TOL = 1e-6
ABS_FLOOR = 1e-8


def relative_error(analytic, numeric, floor=ABS_FLOOR):
    """Frobenius-norm relative error; below ``floor`` the error is absolute."""
    diff = np.linalg.norm(np.asarray(analytic) - np.asarray(numeric))
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), floor)
    return float(diff / scale)


def random_instance(rng, c, k, theta_scale=2.0):
    """Random confidence matrix, one-hot votes and true class."""
    theta = rng.uniform(-theta_scale, theta_scale, size=(c, k))
    g = np.eye(c)[rng.integers(0, c, size=k)]
    m = int(rng.integers(0, c))
    return theta, g, m


def gradient_check(trials=200, c=None, k=None, gammas=(5.0, 25.0), alpha=10.0, seed=0,
                   h=1e-5):
    """Largest relative error between analytic and central-difference gradients.

    ``c`` and ``k`` are drawn from 2..6 and 1..12 per trial when not fixed;
    ``gamma`` cycles through ``gammas``.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in range(int(trials)):
        cc = int(rng.integers(2, 7)) if c is None else int(c)
        kk = int(rng.integers(1, 13)) if k is None else int(k)
        hp = HyperParams(alpha=alpha, gamma=float(gammas[t % len(gammas)]))
        theta, g, m = random_instance(rng, cc, kk)
        analytic = sample_grad(theta, g, m, hp)
        numeric = finite_diff_grad(lambda th: sample_loss(th, g, m, hp).total, theta, h=h)
        worst = max(worst, relative_error(analytic, numeric))
    return worst
