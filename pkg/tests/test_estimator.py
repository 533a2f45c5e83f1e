import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import cross_val_score
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from margin_ensemble import ConfidenceCombiner, MarginEnsembleClassifier, init_theta, train


def test_params_round_trip():
    est = MarginEnsembleClassifier(n_estimators=4, gamma=10.0)
    params = est.get_params()
    assert params["n_estimators"] == 4 and params["gamma"] == 10.0
    other = clone(est).set_params(max_depth=3)
    assert other.max_depth == 3 and est.max_depth == 8


def test_fit_predict_string_labels(iris):
    y = np.array(["setosa", "versicolor", "virginica"])[iris.labels]
    est = MarginEnsembleClassifier(max_epochs=50).fit(iris.features, y)
    pred = est.predict(iris.features)
    assert set(pred) <= set(y)
    assert np.mean(pred == y) > 0.95
    proba = est.predict_proba(iris.features)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
    assert est.vote_stack(iris.features[:5]).shape == (5, 10, 3)
    assert est.theta_.shape == (3, 10)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        MarginEnsembleClassifier().predict(np.zeros((2, 2)))


def test_composes_with_pipeline_and_cv(wine):
    pipe = make_pipeline(StandardScaler(), MarginEnsembleClassifier(n_estimators=5, max_epochs=20))
    scores = cross_val_score(pipe, wine.features, wine.labels, cv=3)
    assert scores.shape == (3,) and np.all(scores > 0.8)


def test_deterministic_with_fixed_seed(wine):
    a = MarginEnsembleClassifier(max_epochs=20, random_state=5).fit(wine.features, wine.labels)
    b = MarginEnsembleClassifier(max_epochs=20, random_state=5).fit(wine.features, wine.labels)
    assert a.theta_.tobytes() == b.theta_.tobytes()


def test_combiner_matches_functional_train(rng):
    votes = rng.integers(0, 3, size=(60, 4))
    stack, y = np.eye(3)[votes], rng.integers(0, 3, size=60)
    comb = ConfidenceCombiner(max_epochs=15, random_state=2).fit(stack, y)
    report = train(stack, y, comb.hyperparams())
    np.testing.assert_array_equal(comb.theta_, report.theta)
    np.testing.assert_array_equal(comb.predict(stack), comb.predict_proba(stack).argmax(axis=1))
    assert 0.0 <= comb.score(stack, y) <= 1.0


def test_combiner_zero_lr_is_majority_start(rng):
    votes = rng.integers(0, 2, size=(10, 3))
    comb = ConfidenceCombiner(learning_rate=0.0, max_epochs=1).fit(np.eye(2)[votes], votes[:, 0])
    np.testing.assert_array_equal(comb.theta_, init_theta(2, 3, 1))


def test_combiner_rejects_wrong_stack(rng):
    votes = rng.integers(0, 2, size=(10, 3))
    comb = ConfidenceCombiner(max_epochs=1).fit(np.eye(2)[votes], votes[:, 0])
    with pytest.raises(ValueError):
        comb.predict(np.eye(2)[votes[:, :2]])


def test_sklearn_estimator_checks():
    from sklearn.utils.estimator_checks import check_estimator
    results = check_estimator(MarginEnsembleClassifier(n_estimators=3, max_epochs=5),
                              on_fail=None)
    failed = [r["check_name"] for r in results if r["status"] == "failed"]
    assert failed == []
