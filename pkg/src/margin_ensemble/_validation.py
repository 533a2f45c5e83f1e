"""Input validation helpers shared across the package."""

import numpy as np


class InputError(ValueError):
    """Raised when an input violates a documented precondition."""


class NumericFloorWarning(RuntimeWarning):
    """Emitted when a probability is clamped before taking its logarithm."""


def check_theta(theta, c=None, k=None):
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 2:
        raise InputError(f"theta must be 2-D (classes x classifiers), got shape {theta.shape}")
    if theta.shape[0] < 2 or theta.shape[1] < 1:
        raise InputError(f"theta needs at least 2 rows and 1 column, got {theta.shape}")
    if c is not None and theta.shape[0] != c:
        raise InputError(f"theta has {theta.shape[0]} class rows, expected {c}")
    if k is not None and theta.shape[1] != k:
        raise InputError(f"theta has {theta.shape[1]} classifier columns, expected {k}")
    if not np.all(np.isfinite(theta)):
        raise InputError("theta contains non-finite entries")
    return theta


def check_onehot_rows(g):
    """Validate a k x c matrix (or n x k x c stack) of one-hot rows."""
    g = np.asarray(g, dtype=np.float64)
    if g.ndim not in (2, 3):
        raise InputError(f"prediction matrix must be 2-D or 3-D, got shape {g.shape}")
    if not np.all((g == 0.0) | (g == 1.0)) or not np.all(g.sum(axis=-1) == 1.0):
        raise InputError("every prediction row must be one-hot")
    return g


def check_pair(theta, g):
    """Validate a (theta, prediction) pair and return float64 arrays."""
    theta = check_theta(theta)
    g = check_onehot_rows(g)
    c, k = theta.shape
    if g.shape[-2:] != (k, c):
        raise InputError(
            f"prediction matrix shape {g.shape[-2:]} does not match theta (k={k}, c={c})"
        )
    return theta, g


def check_labels(labels, c, n=None):
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise InputError("labels must be 1-D")
    if labels.size and not np.issubdtype(labels.dtype, np.integer):
        if not np.all(np.equal(np.mod(labels, 1), 0)):
            raise InputError("labels must be integer class indices")
    labels = labels.astype(np.int64)
    if n is not None and labels.shape[0] != n:
        raise InputError(f"expected {n} labels, got {labels.shape[0]}")
    if labels.size and (labels.min() < 0 or labels.max() >= c):
        raise InputError(f"labels must lie in 0..{c - 1}")
    return labels


def check_class_index(m, c):
    if not 0 <= int(m) < c:
        raise InputError(f"class index {m} out of range for {c} classes")
    return int(m)


def make_rng(seed, *stream):
    """Independent generator for a named stream of a base seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=stream))
