"""scikit-learn compatible estimators."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import InputError, check_labels, check_onehot_rows
from .forest import predict_stack, train_forest
from .loss_grad import HyperParams
from .optimizer import train
from .tensor_core import _scores, _softmax


def _resolve_seed(random_state):
    if random_state is None:
        return int(np.random.SeedSequence().entropy)
    if not isinstance(random_state, (int, np.integer)):
        raise InputError("random_state must be an int or None")
    return int(random_state)


class ConfidenceCombiner(ClassifierMixin, BaseEstimator):
    """Learn a class-by-classifier confidence matrix over base predictions.

    Inputs are prediction stacks of shape ``(n_samples, n_classifiers,
    n_classes)`` whose rows are one-hot votes.  Targets are class indices.

    Parameters
    ----------
    alpha : float, default=10
        Smoothing sharpness of the margin surrogate.
    gamma : float, default=5
        Margin weight in the loss.
    learning_rate : float, default=0.1
    batch_size : int, default=64
    max_epochs : int, default=500
    tol : float, default=1e-7
    random_state : int or None, default=1

    Attributes
    ----------
    theta_ : ndarray of shape (n_classes, n_classifiers)
    train_report_ : TrainReport
    classes_ : ndarray of shape (n_classes,)
    """

    def __init__(self, alpha=10.0, gamma=5.0, learning_rate=0.1, batch_size=64,
                 max_epochs=500, tol=1e-7, random_state=1):
        self.alpha = alpha
        self.gamma = gamma
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.tol = tol
        self.random_state = random_state

    def hyperparams(self):
        return HyperParams(alpha=self.alpha, gamma=self.gamma, lr=self.learning_rate,
                           batch=self.batch_size, epochs=self.max_epochs, tol=self.tol,
                           seed=_resolve_seed(self.random_state))

    def fit(self, stack, y):
        stack = check_onehot_rows(stack)
        if stack.ndim != 3:
            raise InputError("expected an (n, k, c) prediction stack")
        y = check_labels(y, stack.shape[2], n=stack.shape[0])
        self.train_report_ = train(stack, y, self.hyperparams())
        self.theta_ = self.train_report_.theta
        self.classes_ = np.arange(stack.shape[2])
        return self

    def _check_stack(self, stack):
        check_is_fitted(self, "theta_")
        stack = check_onehot_rows(stack)
        c, k = self.theta_.shape
        if stack.ndim != 3 or stack.shape[1:] != (k, c):
            raise InputError(f"expected stack of shape (n, {k}, {c}), got {stack.shape}")
        return stack

    def decision_function(self, stack):
        return _scores(self.theta_, self._check_stack(stack))

    def predict_proba(self, stack):
        return _softmax(self.decision_function(stack))

    def predict(self, stack):
        return np.argmax(self.decision_function(stack), axis=1)


class MarginEnsembleClassifier(ClassifierMixin, BaseEstimator):
    """Bootstrap CART forest fused through a learned confidence matrix.

    Fitting trains ``n_estimators`` depth-capped trees, collects their votes
    on the training data and learns one confidence per (class, tree) pair
    by descending the margin-maximizing loss.

    Parameters
    ----------
    n_estimators : int, default=10
    max_depth : int or None, default=8
    min_samples_leaf : int, default=1
    alpha, gamma, learning_rate, batch_size, max_epochs, tol :
        See :class:`ConfidenceCombiner`.
    random_state : int or None, default=1
        Seeds both the forest and the combiner.

    Attributes
    ----------
    classes_ : ndarray
    forest_ : ForestModel
    combiner_ : ConfidenceCombiner
    """

    def __init__(self, n_estimators=10, max_depth=8, min_samples_leaf=1, alpha=10.0,
                 gamma=5.0, learning_rate=0.1, batch_size=64, max_epochs=500, tol=1e-7,
                 random_state=1):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.alpha = alpha
        self.gamma = gamma
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=np.float64)
        check_classification_targets(y)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        if self.classes_.shape[0] < 2:
            raise ValueError("training data contains only one class")
        seed = _resolve_seed(self.random_state)
        self.forest_ = train_forest(X, y_enc, k=self.n_estimators, max_depth=self.max_depth,
                                    seed=seed, min_leaf=self.min_samples_leaf,
                                    n_classes=self.classes_.shape[0])
        self.combiner_ = ConfidenceCombiner(
            alpha=self.alpha, gamma=self.gamma, learning_rate=self.learning_rate,
            batch_size=self.batch_size, max_epochs=self.max_epochs, tol=self.tol,
            random_state=seed,
        ).fit(predict_stack(self.forest_, X), y_enc)
        return self

    @property
    def theta_(self):
        return self.combiner_.theta_

    def vote_stack(self, X):
        """Base-classifier vote stack of shape (n, n_estimators, n_classes)."""
        check_is_fitted(self, "forest_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return predict_stack(self.forest_, X)

    def predict_proba(self, X):
        stack = self.vote_stack(X)
        return self.combiner_.predict_proba(stack)

    def predict(self, X):
        stack = self.vote_stack(X)
        return self.classes_[self.combiner_.predict(stack)]
