import csv

import numpy as np
import pytest
from sklearn.datasets import load_iris, load_wine

from margin_ensemble.data import EncodedDataset


def random_stack(rng, n, k, c):
    votes = rng.integers(0, c, size=(n, k))
    return np.eye(c)[votes], rng.integers(0, c, size=n)


def _sklearn_dataset(loader):
    bunch = loader()
    names = [str(t) for t in bunch.target_names]
    # target names already sort in index order for iris and wine
    assert names == sorted(names)
    return EncodedDataset(
        features=bunch.data.astype(np.float64),
        labels=bunch.target.astype(np.int64),
        label_dict={name: i for i, name in enumerate(names)},
    )


@pytest.fixture(scope="session")
def iris():
    return _sklearn_dataset(load_iris)


@pytest.fixture(scope="session")
def wine():
    return _sklearn_dataset(load_wine)


def write_dataset_csv(ds, path):
    decoded = ds.decode(ds.labels)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{j}" for j in range(ds.d)] + ["species"])
        for row, lab in zip(ds.features, decoded):
            w.writerow([repr(float(v)) for v in row] + [lab])
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LOG = []


def record(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LOG.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
