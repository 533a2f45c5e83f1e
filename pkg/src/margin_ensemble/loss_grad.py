"""Margin-maximizing loss over fused probabilities and its gradient.

Per sample with true class ``m`` and fused probabilities ``s``::

    L = -log s_m  -  gamma * s_m  +  gamma * smooth_max2(s, m, alpha)
        (l1: cross-entropy) (l2)      (l3)

where ``smooth_max2`` is the logsumexp surrogate for the largest non-true
probability.  Batches are aggregated by the mean.
"""

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from ._validation import (
    InputError,
    NumericFloorWarning,
    check_class_index,
    check_labels,
    check_pair,
)
from .tensor_core import _log_softmax, _scores, _softmax

LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class HyperParams:
    """Loss and optimizer settings.

    Parameters
    ----------
    alpha : float
        Sharpness of the logsumexp smoothing; larger is closer to a hard max.
    gamma : float
        Weight of the smoothed margin relative to the cross-entropy.
    lr : float
        Gradient-descent step size.
    batch : int
        Mini-batch size.
    epochs : int
        Maximum number of passes over the data.
    tol : float
        Stop once the full-set mean loss changes by less than this.
    seed : int
        Seed for initialization and batch shuffling.
    """

    alpha: float = 10.0
    gamma: float = 5.0
    lr: float = 0.1
    batch: int = 64
    epochs: int = 500
    tol: float = 1e-7
    seed: int = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise InputError(f"alpha must be > 0, got {self.alpha}")
        if not self.gamma >= 0:
            raise InputError(f"gamma must be >= 0, got {self.gamma}")
        if not self.lr >= 0:
            raise InputError(f"lr must be >= 0, got {self.lr}")
        if int(self.batch) < 1:
            raise InputError(f"batch must be >= 1, got {self.batch}")
        if int(self.epochs) < 0:
            raise InputError(f"epochs must be >= 0, got {self.epochs}")
        if not self.tol >= 0:
            raise InputError(f"tol must be >= 0, got {self.tol}")
        if int(self.seed) < 0:
            raise InputError(f"seed must be non-negative, got {self.seed}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class LossBreakdown:
    ce: float
    margin_smooth: float
    l1: float
    l2: float
    l3: float
    total: float

    def to_dict(self):
        return asdict(self)


def max2_exact(s):
    """Second-largest entry, counting a repeated maximum twice."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] < 2:
        raise InputError("max2_exact needs a vector with at least 2 entries")
    return float(np.sort(s)[-2])


def _smooth_max2(s, m, alpha):
    # logsumexp of alpha * (s - Y*s); the zeroed true entry contributes exp(0)
    v = alpha * s
    v[np.arange(s.shape[0]), m] = 0.0
    top = v.max(axis=1)
    return (top + np.log(np.exp(v - top[:, None]).sum(axis=1))) / alpha


def smooth_max2(s, m, alpha):
    """Smooth upper surrogate for the largest probability other than ``s[m]``.

    Returns ``log(1 + sum_{j != m} exp(alpha * s_j)) / alpha``, which lies
    within ``log(c) / alpha`` above ``max(0, max_{j != m} s_j)``.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1:
        raise InputError("s must be a 1-D probability vector")
    m = check_class_index(m, s.shape[0])
    if not alpha > 0:
        raise InputError(f"alpha must be > 0, got {alpha}")
    return float(_smooth_max2(s[None, :].copy(), np.array([m]), float(alpha))[0])


def _terms_from_probs(s, m, hp, log_sm=None):
    """Per-sample (l1, l2, l3, s_m, smooth max) arrays."""
    n = s.shape[0]
    sm = s[np.arange(n), m]
    if log_sm is None:
        if np.any(sm < LOG_FLOOR):
            warnings.warn(
                f"true-class probability below {LOG_FLOOR:g}; log argument clamped",
                NumericFloorWarning,
                stacklevel=3,
            )
        log_sm = np.log(np.maximum(sm, LOG_FLOOR))
    smax = _smooth_max2(s.copy(), m, hp.alpha)
    l1 = -log_sm
    l2 = -hp.gamma * sm
    l3 = hp.gamma * smax
    return l1, l2, l3, sm, smax


def _breakdown(l1, l2, l3, sm, smax):
    ce = float(np.mean(l1))
    t2 = float(np.mean(l2))
    t3 = float(np.mean(l3))
    return LossBreakdown(
        ce=ce,
        margin_smooth=float(np.mean(sm - smax)),
        l1=ce,
        l2=t2,
        l3=t3,
        total=ce + t2 + t3,
    )


def loss_from_probs(s, m, hp):
    """Loss breakdown for a single probability vector and true class ``m``."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] < 2:
        raise InputError("s must be a probability vector with at least 2 entries")
    m = check_class_index(m, s.shape[0])
    return _breakdown(*_terms_from_probs(s[None, :], np.array([m]), hp))


def _stack_terms(theta, g, labels, hp):
    z = _scores(theta, g)
    s = _softmax(z)
    log_sm = _log_softmax(z)[np.arange(z.shape[0]), labels]
    return _terms_from_probs(s, labels, hp, log_sm=log_sm)


def sample_loss(theta, g, m, hp):
    theta, g = check_pair(theta, g)
    if g.ndim != 2:
        raise InputError("sample_loss expects a single k x c prediction matrix")
    m = check_class_index(m, theta.shape[0])
    return _breakdown(*_stack_terms(theta, g[None], np.array([m]), hp))


def per_sample_losses(theta, stack, labels, hp):
    """Total loss of every sample, shape (n,)."""
    theta, stack, labels = _check_batch(theta, stack, labels)
    l1, l2, l3, _, _ = _stack_terms(theta, stack, labels, hp)
    return l1 + l2 + l3


def _check_batch(theta, stack, labels):
    theta, stack = check_pair(theta, stack)
    if stack.ndim != 3:
        raise InputError("expected an n x k x c prediction stack")
    if stack.shape[0] == 0:
        raise InputError("batch is empty")
    labels = check_labels(labels, theta.shape[0], n=stack.shape[0])
    return theta, stack, labels


def batch_loss(theta, stack, labels, hp):
    """Mean loss breakdown over a batch."""
    theta, stack, labels = _check_batch(theta, stack, labels)
    return _breakdown(*_stack_terms(theta, stack, labels, hp))


def _per_sample_grads(theta, g, m, hp):
    """Analytic gradients, one c x k matrix per sample.

    Built term by term from the softmax derivative
    ``ds_j/dtheta_kl = s_j (delta_kj g_lj - g_lk s_k)``.
    """
    n, _, c = g.shape
    rows = np.arange(n)
    z = _scores(theta, g)
    s = _softmax(z)
    sm = s[rows, m]

    gt = np.transpose(g, (0, 2, 1))  # gt[i, k, l] = g[i, l, k]
    delta_m = np.zeros((n, c))
    delta_m[rows, m] = 1.0
    g_lm = g[rows, :, m]  # (n, k)

    # bracket(k, l) with j = m:  delta_km g_lm - g_lk s_k
    bracket_m = delta_m[:, :, None] * g_lm[:, None, :] - gt * s[:, :, None]

    d1 = -bracket_m
    d2 = -hp.gamma * sm[:, None, None] * bracket_m

    # third term: weights exp(alpha s_j) over j != m, shifted for stability
    a = hp.alpha * s
    a[rows, m] = -np.inf
    shift = np.maximum(a.max(axis=1), 0.0)
    e = np.exp(a - shift[:, None])  # exactly 0 at j = m
    denom = e.sum(axis=1) + np.exp(-shift)
    es = e * s
    # sum_{j != m} e_j s_j (delta_kj g_lj - g_lk s_k)
    num = gt * (es[:, :, None] - s[:, :, None] * es.sum(axis=1)[:, None, None])
    d3 = hp.gamma * num / denom[:, None, None]
    return d1 + d2 + d3


def sample_grad(theta, g, m, hp):
    """Gradient of the single-sample loss with respect to theta, shape (c, k)."""
    theta, g = check_pair(theta, g)
    if g.ndim != 2:
        raise InputError("sample_grad expects a single k x c prediction matrix")
    m = check_class_index(m, theta.shape[0])
    return _per_sample_grads(theta, g[None], np.array([m]), hp)[0]


def batch_grad(theta, stack, labels, hp):
    """Mean of per-sample gradients, reduced in sample-index order."""
    theta, stack, labels = _check_batch(theta, stack, labels)
    return _batch_grad(theta, stack, labels, hp)


def _batch_grad(theta, stack, labels, hp):
    grads = _per_sample_grads(theta, stack, labels, hp)
    return np.add.reduce(grads, axis=0) / grads.shape[0]


def finite_diff_grad(loss_fn, theta, h=1e-5):
    """Central-difference gradient of ``loss_fn`` at ``theta``.

    ``loss_fn`` may return a float or a :class:`LossBreakdown`.
    """
    if not h > 0:
        raise InputError(f"step must be > 0, got {h}")
    theta = np.array(theta, dtype=np.float64)

    def f(t):
        out = loss_fn(t)
        return float(out.total if isinstance(out, LossBreakdown) else out)

    grad = np.zeros_like(theta)
    for idx in np.ndindex(theta.shape):
        orig = theta[idx]
        theta[idx] = orig + h
        up = f(theta)
        theta[idx] = orig - h
        down = f(theta)
        theta[idx] = orig
        if not (math.isfinite(up) and math.isfinite(down)):
            raise FloatingPointError(f"non-finite loss when probing entry {idx}")
        grad[idx] = (up - down) / (2.0 * h)
    return grad


def grad_entry_bound(hp, c):
    """Per-entry gradient bound ``1 + gamma + gamma/c * exp(alpha)``."""
    if c < 2:
        raise InputError("need at least 2 classes")
    return 1.0 + hp.gamma + hp.gamma / c * math.exp(hp.alpha)


def lipschitz_bound(c, k, hp):
    if k < 1:
        raise InputError("need at least 1 classifier")
    return math.sqrt(c * k) * grad_entry_bound(hp, c)
