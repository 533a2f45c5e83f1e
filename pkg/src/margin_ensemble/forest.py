"""Bootstrap CART trees (Gini impurity) used as the base classifiers."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import InputError, check_labels, make_rng

LEAF = -1
_FOREST_STREAM = 2


@dataclass
class TreeModel:
    """Binary split tree stored as parallel node arrays.

    Internal node ``i`` sends a sample left iff
    ``x[feature[i]] <= threshold[i]``; leaves have ``feature[i] == -1`` and
    carry their class in ``value[i]``.  Node 0 is the root.
    """

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)

    def _add(self, feature=LEAF, threshold=0.0, value=-1):
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    @property
    def node_count(self):
        return len(self.feature)

    @property
    def depth(self):
        best, todo = 0, [(0, 0)]
        while todo:
            node, d = todo.pop()
            best = max(best, d)
            if self.feature[node] != LEAF:
                todo.extend([(self.left[node], d + 1), (self.right[node], d + 1)])
        return best

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold, dtype=np.float64)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = feature[node] != LEAF
        while np.any(active):
            cur = node[active]
            go_left = X[active, feature[cur]] <= threshold[cur]
            node[active] = np.where(go_left, left[cur], right[cur])
            active = feature[node] != LEAF
        return np.asarray(self.value, dtype=np.int64)[node]

    def decision_path(self, x):
        """Node indices visited by a single sample, root first."""
        path, node = [0], 0
        while self.feature[node] != LEAF:
            f = self.feature[node]
            node = self.left[node] if x[f] <= self.threshold[node] else self.right[node]
            path.append(node)
        return path

    def to_dict(self, node=0):
        if self.feature[node] == LEAF:
            return {"leaf": int(self.value[node])}
        return {
            "feature": int(self.feature[node]),
            "threshold": float(self.threshold[node]),
            "left": self.to_dict(self.left[node]),
            "right": self.to_dict(self.right[node]),
        }

    @classmethod
    def from_dict(cls, record):
        tree = cls()
        todo = [(record, None, None)]
        while todo:
            rec, parent, side = todo.pop()
            if "leaf" in rec:
                idx = tree._add(value=int(rec["leaf"]))
            else:
                idx = tree._add(feature=int(rec["feature"]), threshold=float(rec["threshold"]))
                todo.append((rec["right"], idx, "right"))
                todo.append((rec["left"], idx, "left"))
            if parent is not None:
                getattr(tree, side)[parent] = idx
        return tree


@dataclass
class ForestModel:
    trees: list
    c: int
    feature_count: int
    seed: int
    max_depth: int = None
    min_leaf: int = 1

    @property
    def k(self):
        return len(self.trees)

    def predict_labels(self, X):
        """Per-tree class predictions, shape (n, k)."""
        X = _check_width(X, self.feature_count)
        return np.stack([t.predict(X) for t in self.trees], axis=1)

    def to_dict(self):
        return {
            "c": self.c,
            "feature_count": self.feature_count,
            "seed": self.seed,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, record):
        return cls(
            trees=[TreeModel.from_dict(t) for t in record["trees"]],
            c=int(record["c"]),
            feature_count=int(record["feature_count"]),
            seed=int(record["seed"]),
            max_depth=record.get("max_depth"),
            min_leaf=int(record.get("min_leaf", 1)),
        )


def _check_width(X, d):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != d:
        raise InputError(f"expected features of shape (n, {d}), got {X.shape}")
    return X


def _majority(counts):
    return int(np.argmax(counts))


def _best_split(X, y, features, c, min_leaf):
    """Lowest weighted Gini over candidate features; None if nothing splits.

    Returns (feature, threshold) or None.
    """
    n = y.shape[0]
    best = None
    best_impurity = math.inf
    onehot = np.eye(c)[y]
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        left_counts = np.cumsum(onehot[order], axis=0)[:-1]
        n_left = np.arange(1, n, dtype=np.float64)
        n_right = n - n_left
        valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not np.any(valid):
            continue
        right_counts = left_counts[-1] + onehot[order[-1]] - left_counts
        gini_left = 1.0 - (left_counts ** 2).sum(axis=1) / n_left ** 2
        gini_right = 1.0 - (right_counts ** 2).sum(axis=1) / n_right ** 2
        impurity = (n_left * gini_left + n_right * gini_right) / n
        impurity[~valid] = math.inf
        i = int(np.argmin(impurity))
        if impurity[i] < best_impurity:
            best_impurity = impurity[i]
            thr = 0.5 * (xs[i] + xs[i + 1])
            if thr >= xs[i + 1]:
                thr = xs[i]
            best = (int(f), float(thr))
    return best


def _n_candidate_features(feature_subsample, d):
    if feature_subsample is None:
        return d
    if feature_subsample == "sqrt":
        return max(1, math.ceil(math.sqrt(d)))
    count = int(feature_subsample)
    if not 1 <= count <= d:
        raise InputError(f"feature_subsample must be in 1..{d}, got {count}")
    return count


def train_tree(features, labels, max_depth=None, min_leaf=1, feature_subsample=None,
               rng=None, n_classes=None):
    """Grow a CART classification tree greedily by Gini impurity.

    Parameters
    ----------
    features : array-like of shape (n, d)
    labels : array-like of shape (n,)
        Class indices in ``0..n_classes-1``.
    max_depth : int or None
        ``None`` grows until leaves are pure or too small to split.
    min_leaf : int
        Minimum number of samples on each side of a split.
    feature_subsample : None, "sqrt" or int
        Number of features examined per split.  If none of the drawn
        features can split the node, the remaining ones are tried in the
        same random order.
    rng : numpy.random.Generator, optional
    n_classes : int, optional
        Defaults to ``labels.max() + 1``.

    Returns
    -------
    TreeModel
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InputError("train_tree needs a non-empty (n, d) feature matrix")
    y = np.asarray(labels)
    if y.shape[0] != X.shape[0]:
        raise InputError("features and labels differ in length")
    c = int(n_classes) if n_classes is not None else int(np.max(y)) + 1
    y = check_labels(y, c)
    if max_depth is not None and max_depth < 0:
        raise InputError("max_depth must be >= 0")
    if min_leaf < 1:
        raise InputError("min_leaf must be >= 1")
    rng = np.random.default_rng(0) if rng is None else rng
    d = X.shape[1]
    n_try = _n_candidate_features(feature_subsample, d)

    tree = TreeModel()
    root = tree._add()
    todo = [(root, np.arange(X.shape[0]), 0)]
    while todo:
        node, idx, depth = todo.pop()
        counts = np.bincount(y[idx], minlength=c)
        tree.value[node] = _majority(counts)
        if (max_depth is not None and depth >= max_depth) or np.count_nonzero(counts) == 1 \
                or idx.shape[0] < 2 * min_leaf:
            continue
        order = rng.permutation(d) if n_try < d else np.arange(d)
        split = _best_split(X[idx], y[idx], np.sort(order[:n_try]), c, min_leaf)
        if split is None and n_try < d:
            split = _best_split(X[idx], y[idx], order[n_try:], c, min_leaf)
        if split is None:
            continue
        f, thr = split
        go_left = X[idx, f] <= thr
        tree.feature[node] = f
        tree.threshold[node] = thr
        tree.value[node] = -1
        lnode, rnode = tree._add(), tree._add()
        tree.left[node], tree.right[node] = lnode, rnode
        todo.append((rnode, idx[~go_left], depth + 1))
        todo.append((lnode, idx[go_left], depth + 1))
    return tree


def bootstrap_indices(n, seed, tree_index):
    """Resample of ``n`` indices with replacement for one tree."""
    return make_rng(seed, _FOREST_STREAM, int(tree_index)).integers(0, n, size=n)


def train_forest(features, labels, k=10, max_depth=8, seed=1, min_leaf=1, n_classes=None):
    """Train ``k`` bootstrap trees with sqrt-feature subsampling per split.

    Tree ``t`` draws its bootstrap sample and its split features from a
    generator that depends only on ``(seed, t)``.
    """
    if k < 1:
        raise InputError("need at least one tree")
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InputError("train_forest needs a non-empty (n, d) feature matrix")
    y = np.asarray(labels)
    c = int(n_classes) if n_classes is not None else int(np.max(y)) + 1
    y = check_labels(y, c, n=X.shape[0])
    n = X.shape[0]
    trees = []
    for t in range(k):
        rng = make_rng(seed, _FOREST_STREAM, t)
        idx = rng.integers(0, n, size=n)
        trees.append(train_tree(X[idx], y[idx], max_depth=max_depth, min_leaf=min_leaf,
                                feature_subsample="sqrt", rng=rng, n_classes=c))
    return ForestModel(trees=trees, c=c, feature_count=X.shape[1], seed=int(seed),
                       max_depth=max_depth, min_leaf=min_leaf)


def labels_to_stack(votes, c):
    """One-hot stack of shape (n, k, c) from per-classifier labels (n, k)."""
    votes = np.asarray(votes, dtype=np.int64)
    if votes.ndim != 2:
        raise InputError("votes must have shape (n, k)")
    if votes.size and (votes.min() < 0 or votes.max() >= c):
        raise InputError(f"votes must lie in 0..{c - 1}")
    return np.eye(c)[votes]


def predict_stack(forest, features):
    """Prediction stack ``g`` of shape (n, k, c) for the given samples."""
    return labels_to_stack(forest.predict_labels(features), forest.c)


def _lookup(cell, label_dict):
    if cell in label_dict:
        return label_dict[cell]
    try:
        value = float(cell)
    except ValueError:
        return None
    for key, idx in label_dict.items():
        try:
            if float(key) == value:
                return idx
        except ValueError:
            continue
    return None


def import_stack(path, label_dict=None, c=None):
    """Read an externally produced prediction CSV into a stack.

    The file holds one row per sample and one column per classifier, each
    cell a class label.  An optional ``clf_0,...,clf_{k-1}`` header is
    skipped.  Labels are mapped through ``label_dict``; without one, ``c``
    must be given and cells are read as indices ``0..c-1``.
    """
    if label_dict is None:
        if c is None:
            raise InputError("import_stack needs either label_dict or c")
        label_dict = {str(i): i for i in range(int(c))}
    c = len(label_dict) if c is None else int(c)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i + 1, [cell.strip() for cell in r]) for i, r in enumerate(csv.reader(fh))]
    rows = [(ln, r) for ln, r in rows if any(r)]
    if rows and rows[0][1] == [f"clf_{j}" for j in range(len(rows[0][1]))]:
        rows = rows[1:]
    if not rows:
        raise InputError(f"{path}: prediction file has no data rows")
    k = len(rows[0][1])
    votes = np.empty((len(rows), k), dtype=np.int64)
    for i, (line, row) in enumerate(rows):
        if len(row) != k:
            raise InputError(f"{path}: row {line} has {len(row)} columns, expected {k}")
        for j, cell in enumerate(row):
            idx = _lookup(cell, label_dict)
            if idx is None:
                raise InputError(f"{path}: row {line}, column {j}: unknown label {cell!r}")
            votes[i, j] = idx
    return labels_to_stack(votes, c)
