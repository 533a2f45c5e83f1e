"""Dataset loading, label encoding, seeded splitting and the moons generator."""

import csv
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ._validation import InputError


@dataclass(frozen=True)
class EncodedDataset:
    features: np.ndarray
    labels: np.ndarray
    label_dict: dict = field(default_factory=dict)
    feature_names: tuple = None

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def c(self):
        return len(self.label_dict)

    @property
    def classes(self):
        """Original labels ordered by their encoded index."""
        return [lab for lab, _ in sorted(self.label_dict.items(), key=lambda kv: kv[1])]

    def decode(self, indices):
        classes = self.classes
        return [classes[int(i)] for i in indices]

    def subset(self, idx):
        return replace(self, features=self.features[idx], labels=self.labels[idx])


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def encode_labels(raw):
    """Map original labels to indices by sorted order.

    Numeric labels sort by value, anything else lexicographically.
    """
    uniq = sorted(set(raw))
    if all(_is_number(u) for u in uniq):
        uniq = sorted(uniq, key=float)
    return {lab: i for i, lab in enumerate(uniq)}


def _label_index(label_col, header, ncols):
    if label_col in (None, "last"):
        return ncols - 1
    if isinstance(label_col, int) or (isinstance(label_col, str) and label_col.lstrip("-").isdigit()):
        idx = int(label_col)
        if not -ncols <= idx < ncols:
            raise InputError(f"label column {idx} out of range for {ncols} columns")
        return idx % ncols
    if header is None:
        raise InputError(f"label column {label_col!r} given by name but the file has no header")
    if label_col not in header:
        raise InputError(f"label column {label_col!r} not found in header {header}")
    return header.index(label_col)


def load_csv(path, label_col="last", label_dict=None):
    """Load a numeric CSV with one label column.

    A header is detected when the first row's feature cells are not all
    numeric (or required when ``label_col`` is a column name).  Labels are
    encoded via :func:`encode_labels`, or through ``label_dict`` when one is
    supplied, e.g. to score new data with a trained model.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i + 1, [cell.strip() for cell in r]) for i, r in enumerate(csv.reader(fh))]
    rows = [(ln, r) for ln, r in rows if any(r)]
    if not rows:
        raise InputError(f"{path}: file is empty")

    first = rows[0][1]
    ncols = len(first)
    if ncols < 2:
        raise InputError(f"{path}: need at least one feature column and a label column")
    by_name = isinstance(label_col, str) and label_col != "last" and not label_col.lstrip("-").isdigit()
    provisional = _label_index(label_col, first if by_name else None, ncols)
    has_header = by_name or not all(
        _is_number(cell) for j, cell in enumerate(first) if j != provisional
    )
    header = first if has_header else None
    lab = _label_index(label_col, header, ncols)
    body = rows[1:] if has_header else rows
    if not body:
        raise InputError(f"{path}: no data rows")

    feats = np.empty((len(body), ncols - 1), dtype=np.float64)
    raw = []
    for i, (line, row) in enumerate(body):
        if len(row) != ncols:
            raise InputError(f"{path}: row {line} has {len(row)} columns, expected {ncols}")
        cells = row[:lab] + row[lab + 1:]
        for j, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                raise InputError(f"{path}: row {line}, column {j if j < lab else j + 1}: "
                                 f"non-numeric value {cell!r}") from None
            if not math.isfinite(value):
                raise InputError(f"{path}: row {line}, column {j if j < lab else j + 1}: "
                                 f"non-finite value {cell!r}")
            feats[i, j] = value
        raw.append(row[lab])

    if label_dict is None:
        label_dict = encode_labels(raw)
        labels = np.array([label_dict[r] for r in raw], dtype=np.int64)
    else:
        label_dict = dict(label_dict)
        labels = np.empty(len(raw), dtype=np.int64)
        for i, r in enumerate(raw):
            if r not in label_dict:
                numeric = [v for k_, v in label_dict.items()
                           if _is_number(k_) and _is_number(r) and float(k_) == float(r)]
                if not numeric:
                    raise InputError(f"{path}: row {body[i][0]}: label {r!r} not in label dictionary")
                labels[i] = numeric[0]
            else:
                labels[i] = label_dict[r]

    names = None
    if header is not None:
        names = tuple(header[:lab] + header[lab + 1:])
    return EncodedDataset(features=feats, labels=labels, label_dict=label_dict, feature_names=names)


def write_csv(ds, path, label_name="label"):
    """Write a dataset back to CSV (features then the decoded label)."""
    names = ds.feature_names or tuple(f"x{j}" for j in range(ds.d))
    decoded = ds.decode(ds.labels)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*names, label_name])
        for row, lab in zip(ds.features, decoded):
            w.writerow([repr(float(v)) for v in row] + [lab])


def holdout_size(n, test_frac):
    """Test-partition size: ``test_frac * n`` rounded half up."""
    frac = Fraction(str(test_frac))
    return math.floor(frac * n + Fraction(1, 2))


def train_test_split(ds, test_frac=0.2, seed=1):
    """Seeded random partition into (train, test)."""
    if not 0 < test_frac < 1:
        raise InputError(f"test_frac must lie in (0, 1), got {test_frac}")
    n_test = holdout_size(ds.n, test_frac)
    if n_test == 0 or n_test == ds.n:
        raise InputError(f"split of {ds.n} samples at {test_frac} leaves an empty partition")
    perm = np.random.default_rng(int(seed)).permutation(ds.n)
    return ds.subset(perm[n_test:]), ds.subset(perm[:n_test])


def gen_moons(n=2000, noise_sigma=0.15, seed=1):
    """Two interleaving half circles with isotropic Gaussian noise.

    Class 0 lies on ``(cos t, sin t)`` and class 1 on
    ``(1 - cos t, 0.5 - sin t)`` with ``t ~ U[0, pi]``.
    """
    if n < 2 or n % 2:
        raise InputError(f"n must be an even number >= 2, got {n}")
    if noise_sigma < 0:
        raise InputError("noise_sigma must be >= 0")
    rng = np.random.default_rng(int(seed))
    half = n // 2
    t0 = rng.uniform(0.0, math.pi, half)
    t1 = rng.uniform(0.0, math.pi, half)
    X = np.concatenate([
        np.column_stack([np.cos(t0), np.sin(t0)]),
        np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)]),
    ])
    if noise_sigma > 0:
        X = X + rng.normal(0.0, noise_sigma, size=X.shape)
    y = np.repeat(np.array([0, 1], dtype=np.int64), half)
    return EncodedDataset(features=X, labels=y, label_dict={"0": 0, "1": 1},
                          feature_names=("x0", "x1"))


def load_features(path, n_features, label_col="last", label_dict=None):
    """Load features for scoring, with or without a label column.

    Files with ``n_features`` columns are read as pure features; files with
    one more column are read through :func:`load_csv` and their labels are
    returned as well (``None`` otherwise).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    if not rows:
        raise InputError(f"{path}: file is empty")
    ncols = len(rows[0])
    if ncols == n_features + 1:
        ds = load_csv(path, label_col=label_col, label_dict=label_dict)
        return ds.features, ds.labels
    if ncols != n_features:
        raise InputError(f"{path}: {ncols} columns, model expects {n_features} features")
    has_header = not all(_is_number(cell.strip()) for cell in rows[0])
    body = rows[1:] if has_header else rows
    if not body:
        raise InputError(f"{path}: no data rows")
    X = np.empty((len(body), ncols), dtype=np.float64)
    for i, row in enumerate(body):
        line = i + 1 + has_header
        if len(row) != ncols:
            raise InputError(f"{path}: row {line} has {len(row)} columns, expected {ncols}")
        for j, cell in enumerate(row):
            try:
                X[i, j] = float(cell)
            except ValueError:
                raise InputError(f"{path}: row {line}, column {j}: non-numeric value {cell!r}") from None
    if not np.all(np.isfinite(X)):
        raise InputError(f"{path}: non-finite feature values")
    return X, None
