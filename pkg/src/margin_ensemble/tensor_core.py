"""Confidence-weighted fusion of one-hot base-classifier predictions.

A confidence matrix ``theta`` has one row per class and one column per base
classifier.  For a sample whose base predictions form the ``k x c`` one-hot
matrix ``g``, the score of class ``j`` is the total confidence that class
``j`` grants to the classifiers voting for it::

    z_j = sum_l theta[j, l] * g[l, j]

Probabilities are ``softmax(z)`` and the fused prediction is their argmax.
"""

import numpy as np

from ._validation import InputError, check_class_index, check_pair


def class_scores(theta, g):
    """Per-class fused scores for one sample (or a stack of samples).

    Parameters
    ----------
    theta : array-like of shape (c, k)
    g : array-like of shape (k, c) or (n, k, c)
        One-hot base predictions; row ``l`` is classifier ``l``'s vote.

    Returns
    -------
    z : ndarray of shape (c,) or (n, c)
    """
    theta, g = check_pair(theta, g)
    return _scores(theta, g)


def _scores(theta, g):
    # diagonal of theta @ g, without forming the c x c product
    return np.einsum("jl,...lj->...j", theta, g)


def softmax(z):
    """Numerically stable softmax along the last axis."""
    z = np.asarray(z, dtype=np.float64)
    if np.any(np.isnan(z)):
        raise InputError("softmax input contains NaN")
    if not np.all(np.isfinite(z)):
        raise InputError("softmax input contains infinite values")
    return _softmax(z)


def _softmax(z):
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def _log_softmax(z):
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def ensemble_predict(theta, g):
    """Fused class index; ties go to the lowest class index.

    softmax is monotone, so the argmax is taken on the raw scores.
    """
    return np.argmax(class_scores(theta, g), axis=-1)


def one_hot(label, c):
    check_class_index(label, c)
    out = np.zeros(c, dtype=np.float64)
    out[int(label)] = 1.0
    return out


def plurality_vote(g):
    """Most-voted class per sample, lowest index on ties.

    Kept independent of ``theta`` so it can serve as the reference for the
    uniform-confidence reduction.
    """
    g = np.asarray(g)
    return np.argmax(g.sum(axis=-2), axis=-1)
