import numpy as np
import pytest

from margin_ensemble import (
    InputError,
    TreeModel,
    ensemble_predict,
    import_stack,
    predict_stack,
    train_forest,
    train_test_split,
    train_tree,
)
from margin_ensemble.forest import ForestModel, bootstrap_indices


def leaf_forest(k, label, c, d=2):
    trees = [TreeModel.from_dict({"leaf": label}) for _ in range(k)]
    return ForestModel(trees=trees, c=c, feature_count=d, seed=0)


def test_pure_labels_give_single_leaf():
    tree = train_tree(np.random.default_rng(0).normal(size=(12, 3)), [2] * 12, n_classes=3)
    assert tree.node_count == 1
    assert tree.value[0] == 2


def test_xor_is_learned_exactly():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([0, 0, 1, 1])
    tree = train_tree(X, y, max_depth=2)
    np.testing.assert_array_equal(tree.predict(X), y)
    assert tree.depth == 2
    # every threshold is a midpoint between the two distinct values
    assert {t for f, t in zip(tree.feature, tree.threshold) if f >= 0} == {0.5}


def test_depth_zero_is_majority_leaf():
    X = np.arange(7, dtype=float)[:, None]
    tree = train_tree(X, [1, 0, 1, 2, 2, 1, 0], max_depth=0)
    assert tree.node_count == 1 and tree.value[0] == 1


def test_majority_tie_goes_to_lowest_class():
    tree = train_tree(np.zeros((4, 1)), [2, 1, 1, 2], n_classes=3)
    assert tree.value[0] == 1


def test_depth_cap_respected(iris):
    for depth in (1, 2, 3, 5):
        tree = train_tree(iris.features, iris.labels, max_depth=depth)
        assert tree.depth <= depth


def test_min_leaf_respected(iris):
    tree = train_tree(iris.features, iris.labels, min_leaf=10)
    leaves = [i for i, f in enumerate(tree.feature) if f < 0]
    counts = np.bincount(
        [tree.decision_path(x)[-1] for x in iris.features], minlength=tree.node_count)
    assert all(counts[i] >= 10 for i in leaves)


def test_train_tree_rejects_empty():
    with pytest.raises(InputError):
        train_tree(np.zeros((0, 2)), [])


def test_tree_round_trip(iris):
    tree = train_tree(iris.features, iris.labels, max_depth=4,
                      feature_subsample="sqrt", rng=np.random.default_rng(5))
    again = TreeModel.from_dict(tree.to_dict())
    np.testing.assert_array_equal(again.predict(iris.features), tree.predict(iris.features))
    assert again.to_dict() == tree.to_dict()


def test_piecewise_constant_prediction(iris):
    tree = train_tree(iris.features, iris.labels, max_depth=5)
    x = iris.features[60].copy()
    path = tree.decision_path(x)
    used = {tree.feature[n]: tree.threshold[n] for n in path[:-1]}
    # nudge a feature the path never tests
    free = [j for j in range(4) if j not in used]
    if free:
        x2 = x.copy()
        x2[free[0]] += 100.0
        assert tree.predict(x2[None])[0] == tree.predict(x[None])[0]
    # small nudge that does not cross any threshold on the path
    x3 = x.copy()
    for node in path[:-1]:
        f, thr = tree.feature[node], tree.threshold[node]
        gap = abs(x3[f] - thr)
        x3[f] += 0.25 * gap * (1 if x3[f] > thr else -1)
    assert tree.predict(x3[None])[0] == tree.predict(x[None])[0]


def test_forest_deterministic(iris):
    a = train_forest(iris.features, iris.labels, k=5, max_depth=4, seed=3)
    b = train_forest(iris.features, iris.labels, k=5, max_depth=4, seed=3)
    assert a.to_dict() == b.to_dict()
    c = train_forest(iris.features, iris.labels, k=5, max_depth=4, seed=4)
    assert a.to_dict() != c.to_dict()


def test_single_deep_tree_memorizes_iris(iris):
    train, _ = train_test_split(iris, 0.2, 1)
    forest = train_forest(train.features, train.labels, k=1, max_depth=None, seed=1)
    acc = np.mean(forest.predict_labels(train.features)[:, 0] == train.labels)
    assert acc >= 0.95


def test_bootstrap_samples_differ_between_trees():
    samples = [np.sort(bootstrap_indices(80, 1, t)) for t in range(4)]
    assert not all(np.array_equal(samples[0], s) for s in samples[1:])
    np.testing.assert_array_equal(bootstrap_indices(80, 1, 2), bootstrap_indices(80, 1, 2))


def test_tree_depends_only_on_seed_and_index(iris):
    three = train_forest(iris.features, iris.labels, k=3, seed=9)
    five = train_forest(iris.features, iris.labels, k=5, seed=9)
    assert [t.to_dict() for t in five.trees[:3]] == [t.to_dict() for t in three.trees]


def test_leaf_forest_stack():
    stack = predict_stack(leaf_forest(3, 1, 3), np.random.default_rng(0).normal(size=(6, 2)))
    assert stack.shape == (6, 3, 3)
    assert np.all(stack == np.array([0.0, 1.0, 0.0]))


def test_stack_rows_are_one_hot(wine):
    forest = train_forest(wine.features, wine.labels, k=4, max_depth=3, seed=2)
    stack = predict_stack(forest, wine.features + 3.0)
    assert np.all(stack.sum(axis=2) == 1.0)
    assert set(np.unique(stack)) <= {0.0, 1.0}


def test_single_tree_with_uniform_theta(iris):
    forest = train_forest(iris.features, iris.labels, k=1, max_depth=3, seed=2)
    stack = predict_stack(forest, iris.features)
    np.testing.assert_array_equal(ensemble_predict(np.ones((3, 1)), stack),
                                  forest.predict_labels(iris.features)[:, 0])


def test_predict_stack_width_mismatch(iris):
    forest = train_forest(iris.features, iris.labels, k=2, seed=2)
    with pytest.raises(InputError):
        predict_stack(forest, iris.features[:, :3])


def test_import_stack(tmp_path):
    p = tmp_path / "preds.csv"
    p.write_text("0,1\n1,1\n")
    stack = import_stack(p, c=2)
    np.testing.assert_array_equal(stack[0], [[1, 0], [0, 1]])
    np.testing.assert_array_equal(stack[1], [[0, 1], [0, 1]])


def test_import_stack_with_header_and_dictionary(tmp_path):
    p = tmp_path / "preds.csv"
    p.write_text("clf_0,clf_1,clf_2\ncat,dog,cat\ndog,dog,bird\n")
    stack = import_stack(p, label_dict={"bird": 0, "cat": 1, "dog": 2})
    assert stack.shape == (2, 3, 3)
    np.testing.assert_array_equal(stack.argmax(axis=2), [[1, 2, 1], [2, 2, 0]])


def test_import_stack_header_only(tmp_path):
    p = tmp_path / "preds.csv"
    p.write_text("clf_0,clf_1\n")
    with pytest.raises(InputError, match="no data rows"):
        import_stack(p, c=2)


def test_import_stack_unknown_label(tmp_path):
    p = tmp_path / "preds.csv"
    p.write_text("0,1\n1,7\n")
    with pytest.raises(InputError, match=r"row 2.*'7'"):
        import_stack(p, c=2)


def test_import_stack_ragged(tmp_path):
    p = tmp_path / "preds.csv"
    p.write_text("0,1\n1\n")
    with pytest.raises(InputError, match="row 2"):
        import_stack(p, c=2)
