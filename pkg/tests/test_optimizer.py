import numpy as np
import pytest

from margin_ensemble import (
    HyperParams,
    InputError,
    batch_loss,
    gen_moons,
    init_theta,
    predict_stack,
    train,
    train_forest,
)
from margin_ensemble import optimizer
from margin_ensemble.tensor_core import softmax

from conftest import random_stack


@pytest.fixture(scope="module")
def moons_stack():
    ds = gen_moons(600, 0.15, 3)
    forest = train_forest(ds.features, ds.labels, k=10, max_depth=8, seed=1)
    return predict_stack(forest, ds.features), ds.labels


def test_init_theta_deterministic_and_in_range():
    a = init_theta(3, 10, 7)
    b = init_theta(3, 10, 7)
    assert a.shape == (3, 10)
    assert a.tobytes() == b.tobytes()
    assert np.all((a >= 0.99) & (a <= 1.01))
    assert not np.array_equal(a, init_theta(3, 10, 8))


def test_init_theta_rejects_bad_shape():
    with pytest.raises(InputError):
        init_theta(1, 3, 0)


def test_zero_learning_rate_keeps_initial_theta(rng):
    stack, labels = random_stack(rng, 40, 5, 3)
    report = train(stack, labels, HyperParams(lr=0.0, epochs=5, tol=0.0, seed=4))
    np.testing.assert_array_equal(report.theta, init_theta(3, 5, 4))
    assert report.epochs_run == 5
    assert len(set(report.loss_curve)) == 1
    assert report.loss_curve[0] == report.initial_loss


def test_training_reduces_loss(moons_stack):
    stack, labels = moons_stack
    report = train(stack, labels, HyperParams(lr=0.1, epochs=200))
    assert report.final_loss < report.initial_loss
    assert np.all(np.isfinite(report.loss_curve))
    assert len(report.loss_curve) == report.epochs_run
    assert report.final_loss == report.loss_curve[-1]
    assert report.final_loss == pytest.approx(
        batch_loss(report.theta, stack, labels, HyperParams()).total, abs=1e-12)


def test_true_class_probability_rises_on_single_sample():
    g = np.array([[[0.0, 1.0]]])
    probs = []
    for epochs in range(1, 11):
        hp = HyperParams(epochs=epochs, tol=0.0, batch=1)
        theta = train(g, [1], hp).theta
        probs.append(softmax(np.einsum("jl,lj->j", theta, g[0]))[1])
    assert all(b > a for a, b in zip(probs, probs[1:]))


def test_training_is_deterministic(moons_stack):
    stack, labels = moons_stack
    hp = HyperParams(epochs=30, batch=17, seed=11)
    a, b = train(stack, labels, hp), train(stack, labels, hp)
    assert a.theta.tobytes() == b.theta.tobytes()
    assert a.loss_curve == b.loss_curve


def test_cross_entropy_descent_without_margin_term():
    # separable: classifier 0 is always right, classifier 1 always wrong
    labels = np.array([0, 1, 2, 0, 1, 2])
    votes = np.column_stack([labels, (labels + 1) % 3])
    stack = np.eye(3)[votes]
    hp = HyperParams(gamma=0.0, epochs=50, batch=2)
    report = train(stack, labels, hp)
    before = batch_loss(init_theta(3, 2, hp.seed), stack, labels, hp).ce
    after = batch_loss(report.theta, stack, labels, hp).ce
    assert after <= before


def test_stops_on_tolerance(rng):
    stack, labels = random_stack(rng, 30, 4, 2)
    report = train(stack, labels, HyperParams(epochs=10_000, tol=1e-3))
    assert report.converged
    assert report.epochs_run < 10_000


def test_last_batch_may_be_smaller(rng):
    stack, labels = random_stack(rng, 10, 3, 2)
    report = train(stack, labels, HyperParams(batch=4, epochs=3, tol=0.0))
    assert report.epochs_run == 3


def test_non_finite_gradient_aborts(monkeypatch, rng):
    stack, labels = random_stack(rng, 10, 3, 2)
    monkeypatch.setattr(optimizer, "_batch_grad", lambda *a: np.full((2, 3), np.nan))
    with pytest.raises(FloatingPointError, match="epoch 0, batch 0"):
        train(stack, labels, HyperParams(epochs=2))


def test_rejects_empty_and_mismatched_inputs(rng):
    with pytest.raises(InputError):
        train(np.zeros((0, 3, 2)), [])
    stack, labels = random_stack(rng, 5, 3, 2)
    with pytest.raises(InputError):
        train(stack, labels[:4])
