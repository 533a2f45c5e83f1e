"""Accuracy, margin diagnostics and decision-boundary grids."""

from dataclasses import asdict, dataclass

import numpy as np

from ._validation import InputError, check_labels, check_pair
from .forest import predict_stack
from .loss_grad import HyperParams, _smooth_max2
from .tensor_core import _scores, _softmax


@dataclass
class EvalReport:
    accuracy_pct: float
    n: int
    per_class_accuracy: list
    margin_mean: float
    margin_min: float
    margin_smooth_mean: float
    frac_negative_margin: float
    assumption_rate: float

    def to_dict(self):
        return asdict(self)


def accuracy(preds, labels):
    """Percentage of predictions equal to the labels."""
    preds = np.asarray(preds)
    labels = np.asarray(labels)
    if preds.shape != labels.shape or preds.ndim != 1:
        raise InputError(f"length mismatch: {preds.shape} vs {labels.shape}")
    if preds.shape[0] == 0:
        raise InputError("accuracy of an empty prediction set is undefined")
    return 100.0 * float(np.count_nonzero(preds == labels)) / preds.shape[0]


def exact_margins(s, labels):
    """True-class probability minus the second-largest probability."""
    rows = np.arange(s.shape[0])
    second = np.sort(s, axis=1)[:, -2]
    return s[rows, labels] - second


def margin_report(theta, stack, labels, hp=None):
    """Accuracy and margin statistics of the fused ensemble on a stack.

    Classes absent from ``labels`` get ``None`` in ``per_class_accuracy``.
    """
    hp = HyperParams() if hp is None else hp
    theta, stack = check_pair(theta, stack)
    if stack.ndim != 3 or stack.shape[0] == 0:
        raise InputError("margin_report needs a non-empty n x k x c stack")
    c = theta.shape[0]
    labels = check_labels(labels, c, n=stack.shape[0])

    z = _scores(theta, stack)
    s = _softmax(z)
    preds = np.argmax(z, axis=1)
    rows = np.arange(s.shape[0])
    correct = preds == labels

    margins = exact_margins(s, labels)
    smooth = s[rows, labels] - _smooth_max2(s.copy(), labels, hp.alpha)

    per_class = []
    for j in range(c):
        mask = labels == j
        per_class.append(100.0 * float(np.mean(correct[mask])) if np.any(mask) else None)

    return EvalReport(
        accuracy_pct=accuracy(preds, labels),
        n=int(s.shape[0]),
        per_class_accuracy=per_class,
        margin_mean=float(np.mean(margins)),
        margin_min=float(np.min(margins)),
        margin_smooth_mean=float(np.mean(smooth)),
        frac_negative_margin=float(np.mean(margins < 0)),
        # the true class is the fused argmax
        assumption_rate=float(np.mean(np.argmax(s, axis=1) == labels)),
    )


def boundary_grid(theta, forest, x_range, y_range, resolution=200):
    """Fused predictions on a ``resolution x resolution`` lattice.

    Endpoints are inclusive.  Rows are ordered with ``x`` varying fastest,
    one ``(x, y, class_index)`` tuple per lattice point.
    """
    if forest.feature_count != 2:
        raise InputError(f"boundary grid needs a 2-feature model, got {forest.feature_count}")
    if resolution < 2:
        raise InputError("resolution must be >= 2")
    xs = np.linspace(float(x_range[0]), float(x_range[1]), int(resolution))
    ys = np.linspace(float(y_range[0]), float(y_range[1]), int(resolution))
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    theta, stack = check_pair(theta, predict_stack(forest, pts))
    preds = np.argmax(_scores(theta, stack), axis=1)
    return [(float(x), float(y), int(p)) for (x, y), p in zip(pts, preds)]
