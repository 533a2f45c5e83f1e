"""Mini-batch gradient descent on the confidence matrix."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import InputError, check_labels, check_onehot_rows, make_rng
from .loss_grad import HyperParams, _batch_grad, _stack_terms

INIT_SPREAD = 0.01


@dataclass
class TrainReport:
    epochs_run: int
    loss_curve: list = field(default_factory=list)
    initial_loss: float = math.nan
    final_loss: float = math.nan
    converged: bool = False
    theta: np.ndarray = None


def init_theta(c, k, seed):
    """All-ones matrix with a small seeded uniform jitter.

    Starting near all-ones means training starts from plain majority voting.
    """
    if c < 2 or k < 1:
        raise InputError(f"need c >= 2 and k >= 1, got c={c}, k={k}")
    rng = make_rng(seed, 0)
    return 1.0 + rng.uniform(-INIT_SPREAD, INIT_SPREAD, size=(c, k))


def _full_loss(theta, stack, labels, hp):
    l1, l2, l3, _, _ = _stack_terms(theta, stack, labels, hp)
    return float(np.mean(l1 + l2 + l3))


def train(stack, labels, hp=None, theta0=None):
    """Fit a confidence matrix to a prediction stack.

    Each epoch visits a fresh seeded permutation of the samples in batches
    of ``hp.batch``; the last batch may be smaller.  After every epoch the
    mean loss over the whole stack is recorded, and training stops when it
    changes by less than ``hp.tol`` or the epoch budget runs out.

    Parameters
    ----------
    stack : array-like of shape (n, k, c)
    labels : array-like of shape (n,)
    hp : HyperParams, optional
    theta0 : array-like of shape (c, k), optional
        Starting point; defaults to :func:`init_theta` with ``hp.seed``.

    Returns
    -------
    TrainReport
    """
    hp = HyperParams() if hp is None else hp
    stack = check_onehot_rows(stack)
    if stack.ndim != 3 or stack.shape[0] == 0:
        raise InputError("training needs a non-empty n x k x c stack")
    n, k, c = stack.shape
    labels = check_labels(labels, c, n=n)
    if theta0 is None:
        theta = init_theta(c, k, hp.seed)
    else:
        theta = np.array(theta0, dtype=np.float64)
        if theta.shape != (c, k):
            raise InputError(f"theta0 shape {theta.shape} does not match ({c}, {k})")

    rng = make_rng(hp.seed, 1)
    batch = int(hp.batch)
    prev = initial = _full_loss(theta, stack, labels, hp)
    if not math.isfinite(initial):
        raise FloatingPointError("non-finite loss at initialization")

    curve = []
    converged = False
    for epoch in range(int(hp.epochs)):
        order = rng.permutation(n)
        for b, start in enumerate(range(0, n, batch)):
            idx = order[start:start + batch]
            grad = _batch_grad(theta, stack[idx], labels[idx], hp)
            if not np.all(np.isfinite(grad)):
                raise FloatingPointError(f"non-finite gradient at epoch {epoch}, batch {b}")
            theta = theta - hp.lr * grad
        loss = _full_loss(theta, stack, labels, hp)
        if not math.isfinite(loss):
            raise FloatingPointError(f"non-finite loss after epoch {epoch}")
        curve.append(loss)
        if abs(loss - prev) < hp.tol:
            converged = True
            break
        prev = loss

    return TrainReport(
        epochs_run=len(curve),
        loss_curve=curve,
        initial_loss=initial,
        final_loss=curve[-1] if curve else initial,
        converged=converged,
        theta=theta,
    )
