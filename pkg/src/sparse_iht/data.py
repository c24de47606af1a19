"""IRIS loading, seeded 120/30 splitting and train-split standardization."""
import csv
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np

N_ROWS = 150
N_TRAIN = 120
CLASS_NAMES = ("setosa", "versicolor", "virginica")


class IrisFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    standardized: bool = False
    mean: np.ndarray = None
    std: np.ndarray = None

    def __len__(self):
        return self.labels.shape[0]

    def class_counts(self):
        return tuple(int(c) for c in np.bincount(self.labels, minlength=len(CLASS_NAMES)))


@dataclass(frozen=True, eq=False)
class Split:
    train: np.ndarray
    test: np.ndarray
    data_seed: int


def _parse_label(token):
    t = token.strip().lower()
    if t.startswith("iris-"):
        t = t[5:]
    if t in CLASS_NAMES:
        return CLASS_NAMES.index(t)
    try:
        value = float(t)
    except ValueError:
        return None
    if value in (0.0, 1.0, 2.0):
        return int(value)
    return None


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_iris(text):
    """Parse IRIS rows: four numeric columns then a class name or index.

    An optional header row (non-numeric feature fields) is skipped, as are
    blank lines. Row numbers in errors are 1-based file line numbers.
    """
    features, labels = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not f.strip() for f in row):
            continue
        if not features and lineno == 1 and not all(_is_number(f) for f in row[:4]):
            continue
        if len(row) != 5:
            raise IrisFormatError(f"row {lineno}: expected 5 columns, got {len(row)}")
        try:
            values = [float(f) for f in row[:4]]
        except ValueError:
            raise IrisFormatError(f"row {lineno}: non-numeric feature value") from None
        if not all(np.isfinite(values)):
            raise IrisFormatError(f"row {lineno}: non-finite feature value")
        label = _parse_label(row[4])
        if label is None:
            raise IrisFormatError(f"row {lineno}: unknown class label {row[4].strip()!r}")
        features.append(values)
        labels.append(label)
    if not features:
        raise IrisFormatError("no data rows found")
    if len(features) != N_ROWS:
        raise IrisFormatError(f"expected {N_ROWS} data rows, got {len(features)}")
    return Dataset(np.array(features), np.array(labels, dtype=np.int64))


def load_iris(path=None):
    """Load IRIS from ``path``, or from the bundled canonical copy."""
    if path is None:
        text = resources.files(__package__).joinpath("iris.csv").read_text()
    else:
        with open(path, newline="") as fh:
            text = fh.read()
    return parse_iris(text)


def standardize(features, mean, std):
    return (features - mean) / std


def split_and_standardize(d, data_seed):
    """Seeded shuffle into 120 train / 30 test rows, standardized with train statistics.

    Uses population (divide-by-N) standard deviations. Returns
    ``(train, test, split)``; both sets carry the train mean/std.
    """
    order = np.random.default_rng(data_seed).permutation(len(d))
    split = Split(np.sort(order[:N_TRAIN]), np.sort(order[N_TRAIN:]), int(data_seed))
    raw_train = d.features[split.train]
    mean = raw_train.mean(axis=0)
    std = raw_train.std(axis=0)
    if np.any(std == 0):
        raise ValueError("a training feature column is constant")
    train = Dataset(standardize(raw_train, mean, std), d.labels[split.train], True, mean, std)
    test = Dataset(standardize(d.features[split.test], mean, std), d.labels[split.test], True, mean, std)
    return train, test, split
