"""Seeded IRIS experiments: sparse IHT runs, dense baselines, sweeps and summaries.

Seed discipline: the data seed drives the train/test shuffle, the init seed
drives the parameter values (all n coordinates are drawn, then masked) and the
Monte Carlo trial streams ``(init_seed, j)``, and the support seed picks the
initial nonzero coordinates. Each feeds its own generator.
"""
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .data import load_iris, split_and_standardize
from .objectives import OneLayerClassifier
from .optim import IhtConfig, gd_run, iht_run
from .rss import derive_learning_rate, estimate_l2s
from .stability import check_ht_stable
from .thresholding import SparseVector

log = logging.getLogger(__name__)

N_PARAMS = 15
SEED_HIGH = 2**31 - 1
SUMMARY_METRICS = ("gamma", "l_hat", "train_loss", "test_loss", "train_acc", "test_acc", "steps_taken")


@dataclass(frozen=True)
class SeedTriple:
    data_seed: int
    init_seed: int
    support_seed: int


@dataclass(frozen=True)
class Protocol:
    max_steps: int = 2000
    loss_stop: float = 0.05
    n_monte: int = 100


@dataclass
class ExperimentRecord:
    kind: str
    s: int
    data_seed: int
    init_seed: int
    support_seed: int = None
    status: str = "ok"
    error: str = ""
    gamma: float = float("nan")
    l_hat: float = float("nan")
    stop_reason: str = ""
    steps_taken: int = -1
    train_loss: float = float("nan")
    test_loss: float = float("nan")
    train_acc: float = float("nan")
    test_acc: float = float("nan")
    min_abs_support: float = None
    max_grad_off: float = None
    stable: bool = None
    margin: float = None
    support: tuple = ()
    train_class_counts: tuple = ()
    theta: tuple = ()
    grad: tuple = ()

    @property
    def ok(self):
        return self.status == "ok"

    def sort_key(self):
        return (self.kind != "sparse", self.s, self.data_seed, self.init_seed,
                -1 if self.support_seed is None else self.support_seed)


def sparse_init(n, s, init_seed, support_seed):
    """Sparse start: support from ``support_seed``, values from ``init_seed``."""
    if not 1 <= s < n:
        raise ValueError(f"need 1 <= s < n, got n={n}, s={s}")
    values = np.random.default_rng(init_seed).standard_normal(n)
    keep = np.random.default_rng(support_seed).choice(n, size=s, replace=False)
    theta = np.zeros(n)
    theta[keep] = values[keep]
    return SparseVector.from_dense(theta, s)


def dense_init(n, init_seed):
    return np.random.default_rng(init_seed).standard_normal(n)


def _objectives(dataset, data_seed):
    train, test, _ = split_and_standardize(dataset, data_seed)
    return OneLayerClassifier(train.features, train.labels), OneLayerClassifier(test.features, test.labels), train


def _fill_metrics(record, train_obj, test_obj, theta, grad, trace):
    record.stop_reason = trace.stop_reason
    record.steps_taken = trace.steps_taken
    record.train_loss = trace.final_loss
    record.test_loss = test_obj.value(theta)
    record.train_acc = train_obj.accuracy(theta)
    record.test_acc = test_obj.accuracy(theta)
    record.support = tuple(int(i) for i in np.flatnonzero(theta))
    record.theta = tuple(float(v) for v in theta)
    record.grad = tuple(float(v) for v in grad)


def train_sparse(seeds, s, protocol=Protocol(), dataset=None, trace_every=0):
    """One sparse experiment; returns ``(record, trace, theta0)``.

    Failures (degenerate estimate, divergence) are captured in the record's
    status and ``trace`` is then None.
    """
    dataset = dataset if dataset is not None else load_iris()
    train_obj, test_obj, train = _objectives(dataset, seeds.data_seed)
    theta0 = sparse_init(train_obj.dim, s, seeds.init_seed, seeds.support_seed)
    record = ExperimentRecord("sparse", s, seeds.data_seed, seeds.init_seed, seeds.support_seed,
                              train_class_counts=train.class_counts())
    try:
        est = estimate_l2s(train_obj, s, protocol.n_monte, seed=seeds.init_seed)
        record.l_hat = est.l_hat
        record.gamma = derive_learning_rate(est)
        cfg = IhtConfig(s, record.gamma, protocol.max_steps, protocol.loss_stop, trace_every)
        final, trace = iht_run(train_obj, theta0, cfg)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        log.warning("sparse run s=%d %s failed: %s", s, seeds, exc)
        record.status, record.error = "failed", str(exc)
        return record, None, theta0

    _fill_metrics(record, train_obj, test_obj, final.dense, trace.final_grad, trace)
    report = check_ht_stable(final, trace.final_grad, record.gamma)
    record.min_abs_support = report.min_abs_on_support
    record.max_grad_off = report.max_grad_off_support
    record.stable = report.is_stable
    record.margin = report.margin
    return record, trace, theta0


def run_sparse_experiment(seeds, s, protocol=Protocol(), dataset=None):
    return train_sparse(seeds, s, protocol, dataset)[0]


def train_dense(data_seed, init_seed, protocol=Protocol(), dataset=None, trace_every=0):
    """Dense baseline by gradient descent with an unrestricted Monte Carlo step size."""
    dataset = dataset if dataset is not None else load_iris()
    train_obj, test_obj, train = _objectives(dataset, data_seed)
    theta0 = dense_init(train_obj.dim, init_seed)
    record = ExperimentRecord("dense", train_obj.dim, data_seed, init_seed,
                              train_class_counts=train.class_counts())
    try:
        est = estimate_l2s(train_obj, train_obj.dim, protocol.n_monte, seed=init_seed)
        record.l_hat = est.l_hat
        record.gamma = derive_learning_rate(est)
        final, trace = gd_run(train_obj, theta0, record.gamma, protocol.max_steps,
                              protocol.loss_stop, trace_every)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        log.warning("dense run data=%d init=%d failed: %s", data_seed, init_seed, exc)
        record.status, record.error = "failed", str(exc)
        return record, None, theta0
    _fill_metrics(record, train_obj, test_obj, final, trace.final_grad, trace)
    return record, trace, theta0


def run_dense_baseline(data_seed, init_seed, protocol=Protocol(), dataset=None):
    return train_dense(data_seed, init_seed, protocol, dataset)[0]


def sweep_seeds(runs, sparsities, master_seed=0, pair_data_seeds=False):
    """Seed triples for every (s, run) and (data, init) pairs for the dense runs.

    Each sparsity level gets an independent stream keyed by ``(master_seed, s)``;
    the dense baseline uses ``(master_seed, 0)``. With ``pair_data_seeds`` the
    i-th sparse run at every level reuses the i-th dense data seed.
    """
    dense = np.random.default_rng([master_seed, 0]).integers(0, SEED_HIGH, size=(runs, 2))
    dense_pairs = [(int(a), int(b)) for a, b in dense]
    sparse = {}
    for s in sparsities:
        draws = np.random.default_rng([master_seed, s]).integers(0, SEED_HIGH, size=(runs, 3))
        sparse[s] = [
            SeedTriple(dense_pairs[i][0] if pair_data_seeds else int(d), int(a), int(b))
            for i, (d, a, b) in enumerate(draws)
        ]
    return sparse, dense_pairs


def _sparse_job(args):
    seeds, s, protocol, dataset = args
    return run_sparse_experiment(seeds, s, protocol, dataset)


def _dense_job(args):
    data_seed, init_seed, protocol, dataset = args
    return run_dense_baseline(data_seed, init_seed, protocol, dataset)


def run_sweep(runs, sparsities=range(1, N_PARAMS), protocol=Protocol(), dataset=None,
              master_seed=0, pair_data_seeds=False, dense=True, jobs=1):
    """Run the sparse sweep (and dense baseline); records come back sorted."""
    dataset = dataset if dataset is not None else load_iris()
    sparse_seeds, dense_pairs = sweep_seeds(runs, list(sparsities), master_seed, pair_data_seeds)
    sparse_jobs = [(t, s, protocol, dataset) for s, triples in sparse_seeds.items() for t in triples]
    dense_jobs = [(d, i, protocol, dataset) for d, i in dense_pairs] if dense else []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_sparse_job, sparse_jobs, chunksize=4))
            records += list(pool.map(_dense_job, dense_jobs, chunksize=4))
    else:
        records = [_sparse_job(j) for j in sparse_jobs] + [_dense_job(j) for j in dense_jobs]
    return sorted(records, key=ExperimentRecord.sort_key)


def _stats(values):
    if not values:
        return dict.fromkeys(("min", "q1", "median", "q3", "max", "mean"), float("nan"))
    # sorted so the float reductions do not depend on record order
    a = np.sort(np.asarray(values, dtype=np.float64))
    q1, med, q3 = np.percentile(a, [25, 50, 75])
    return {"min": a.min(), "q1": q1, "median": med, "q3": q3, "max": a.max(), "mean": a.mean()}


def aggregate(records):
    """Per-(kind, s) summary rows: order statistics per metric, stability rate, stop counts."""
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    groups = {}
    for r in records:
        groups.setdefault((r.kind != "sparse", r.s, r.kind), []).append(r)
    rows = []
    for (_, s, kind), group in sorted(groups.items()):
        ok = [r for r in group if r.ok]
        row = {"kind": kind, "s": s, "n_runs": len(group), "n_failed": len(group) - len(ok)}
        for metric in SUMMARY_METRICS:
            for stat, value in _stats([getattr(r, metric) for r in ok]).items():
                row[f"{metric}_{stat}"] = float(value)
        checked = [r for r in ok if r.stable is not None]
        row["stable_rate"] = (sum(r.stable for r in checked) / len(checked)) if checked else float("nan")
        row["stop_loss_stop"] = sum(r.stop_reason == "loss_stop" for r in ok)
        row["stop_max_steps"] = sum(r.stop_reason == "max_steps" for r in ok)
        rows.append(row)
    return rows


# -- CSV I/O ---------------------------------------------------------------

RECORD_COLUMNS = [f.name for f in fields(ExperimentRecord)]
_INT_FIELDS = {"s", "data_seed", "init_seed", "support_seed", "steps_taken"}
_FLOAT_FIELDS = {"gamma", "l_hat", "train_loss", "test_loss", "train_acc", "test_acc",
                 "min_abs_support", "max_grad_off", "margin"}
_INT_TUPLE_FIELDS = {"support", "train_class_counts"}
_FLOAT_TUPLE_FIELDS = {"theta", "grad"}


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".9g")
    if isinstance(value, tuple):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def write_records_csv(path, records):
    with open(path, "w", newline="") as fh:
        fh.write("# columns: " + ",".join(RECORD_COLUMNS)
                 + "; floats to 9 significant digits; tuples space-separated;"
                 + " features standardized with train-split mean and population std\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for r in sorted(records, key=ExperimentRecord.sort_key):
            writer.writerow([_fmt(v) for v in asdict(r).values()])


def _parse(name, text):
    if name in _INT_FIELDS:
        return int(text) if text else None
    if name in _FLOAT_FIELDS:
        return float(text) if text else None
    if name == "stable":
        return None if text == "" else text == "1"
    if name in _INT_TUPLE_FIELDS:
        return tuple(int(t) for t in text.split())
    if name in _FLOAT_TUPLE_FIELDS:
        return tuple(float(t) for t in text.split())
    return text


def read_records_csv(path):
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or set(reader.fieldnames) != set(RECORD_COLUMNS):
        raise ValueError(f"{path}: not a records file (unexpected header)")
    return [ExperimentRecord(**{k: _parse(k, v) for k, v in row.items()}) for row in reader]


def write_summary_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([_fmt(v) for v in row.values()])
