"""Accuracy benchmark harness.

A run takes a labeled dataset (loaded from disk or synthesized), holds out a
seeded test sample, and evaluates the selected classifiers over a k sweep and
one or more voting rules.  Results land in a flat CSV with one row per
(classifier, rule, k) cell.

Two evaluation paths produce identical accuracies:

* the default sweep path computes each query's k_max nearest-neighbor prefix
  (exact or approximate) once and re-tallies per k, leaving the timing column
  blank so repeated runs are byte-identical;
* with ``record_timings=True`` every cell is evaluated independently through
  the one-shot classify operations and its wall time is recorded (index build
  time is amortized outside the cells).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classifiers import (
    classify_asymptotic_hsp,
    classify_hsp,
    classify_knn,
    classify_probabilistic_asymptotic_hsp,
    classify_probabilistic_knn,
)
from .dataset import LabeledDataset
from .errors import DataError, FormatError
from .hsp import hsp_neighbors
from .index import IndexParams, SmallWorldIndex
from .io import load_dataset
from .knn import knn_search
from .synthetic import GeneratorSpec, generate, parse_json_object
from .voting import VoteRule, tally_and_predict

CLASSIFIERS = ("knn", "pknn", "hsp", "ahsp", "pahsp")
RULES = ("majority", "dudani", "invdist")

# classifiers whose neighborhood depends on k; "hsp" is parameter-free
_K_SWEEP = frozenset({"knn", "pknn", "ahsp", "pahsp"})
# classifiers that search through the small-world graph
_INDEXED = frozenset({"pknn", "pahsp"})

CSV_HEADER = "classifier,rule,k,accuracy,n_test,n_train,dim,seed,elapsed_ms"


@dataclass(frozen=True)
class ExperimentConfig:
    """What to run: data source, split, sweep range, classifiers, rules."""

    generator: Optional[GeneratorSpec] = None
    data_path: Optional[str] = None
    labels_path: Optional[str] = None
    test_count: int = 1000
    k_min: int = 1
    k_max: int = 300
    classifiers: tuple = CLASSIFIERS
    rules: tuple = RULES
    seed: int = 0
    index_params: IndexParams = field(default_factory=IndexParams)
    record_timings: bool = False

    def __post_init__(self):
        if (self.generator is None) == (self.data_path is None):
            raise DataError("exactly one of generator or data_path is required")
        if self.test_count < 1:
            raise DataError("test_count must be at least 1")
        if not 1 <= self.k_min <= self.k_max:
            raise DataError("need 1 <= k_min <= k_max")
        object.__setattr__(self, "classifiers", tuple(self.classifiers))
        object.__setattr__(self, "rules", tuple(self.rules))
        for name in self.classifiers:
            if name not in CLASSIFIERS:
                raise DataError(f"unknown classifier {name!r}")
        for rule in self.rules:
            try:
                VoteRule.coerce(rule)
            except ValueError as exc:
                raise DataError(str(exc))


def config_from_json(text: str) -> ExperimentConfig:
    """Build an ExperimentConfig from its JSON form.

    Keys mirror the dataclass fields; the data source is either a
    ``generator`` object or ``data``/``labels`` paths, and index parameters
    live under ``index``.
    """
    payload = parse_json_object(text, "benchmark config")
    kwargs = {}
    allowed = {"generator", "data", "labels", "test_count", "k_min", "k_max",
               "classifiers", "rules", "seed", "index", "record_timings"}
    unknown = sorted(set(payload) - allowed)
    if unknown:
        raise DataError(f"unknown benchmark config fields: {', '.join(unknown)}")
    if "generator" in payload:
        gen = payload["generator"]
        if not isinstance(gen, dict):
            raise FormatError("generator must be a JSON object")
        kwargs["generator"] = GeneratorSpec.from_json(json.dumps(gen))
    kwargs["data_path"] = payload.get("data")
    kwargs["labels_path"] = payload.get("labels")
    for key in ("test_count", "k_min", "k_max", "seed", "record_timings"):
        if key in payload:
            kwargs[key] = payload[key]
    if "classifiers" in payload:
        kwargs["classifiers"] = tuple(payload["classifiers"])
    if "rules" in payload:
        kwargs["rules"] = tuple(payload["rules"])
    if "index" in payload:
        idx = payload["index"]
        if not isinstance(idx, dict):
            raise FormatError("index parameters must be a JSON object")
        try:
            kwargs["index_params"] = IndexParams(**idx)
        except TypeError as exc:
            raise DataError(f"bad index parameters: {exc}")
    return ExperimentConfig(**kwargs)


@dataclass(frozen=True)
class ResultRow:
    classifier: str
    rule: str
    k: Optional[int]  # None for the parameter-free classifier
    accuracy: float  # percent correct on the test sample
    n_test: int
    n_train: int
    dim: int
    seed: int
    elapsed_ms: Optional[float] = None


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple
    n_train: int
    n_test: int
    dim: int
    seed: int


def split_dataset(full: LabeledDataset, test_count: int, seed: int):
    """Seeded holdout without replacement.

    Returns (train dataset, test matrix, test labels).  Indices are sorted so
    the split is a deterministic function of (dataset, test_count, seed).
    """
    if test_count >= full.n:
        raise DataError(
            f"test_count {test_count} must be smaller than the dataset ({full.n})"
        )
    rng = np.random.default_rng(seed)
    test_idx = np.sort(rng.choice(full.n, size=test_count, replace=False))
    train_idx = np.setdiff1d(np.arange(full.n), test_idx, assume_unique=True)
    train = LabeledDataset(full.vectors[train_idx], full.labels[train_idx])
    return train, full.vectors[test_idx].copy(), full.labels[test_idx].copy()


def _load_full(config: ExperimentConfig) -> LabeledDataset:
    if config.generator is not None:
        return generate(config.generator)
    return load_dataset(config.data_path, config.labels_path)


def _cells(config: ExperimentConfig):
    """Canonical row order: classifier, then rule, then k."""
    for name in config.classifiers:
        for rule in config.rules:
            if name in _K_SWEEP:
                for k in range(config.k_min, config.k_max + 1):
                    yield name, rule, k
            else:
                yield name, rule, None


def _exact_prefixes(train: LabeledDataset, test_mat: np.ndarray, k: int):
    ids = np.empty((test_mat.shape[0], k), dtype=np.int64)
    dists = np.empty((test_mat.shape[0], k), dtype=np.float64)
    for i, q in enumerate(test_mat):
        res = knn_search(train, q, k)
        ids[i], dists[i] = res.ids, res.dists
    return ids, dists


def _approx_prefixes(index: SmallWorldIndex, test_mat, k_max: int, ef: int):
    """Per-query ANN lists; prefixes are consistent while k <= ef."""
    k = min(k_max, ef)
    ids = np.empty((test_mat.shape[0], k), dtype=np.int64)
    dists = np.empty((test_mat.shape[0], k), dtype=np.float64)
    for i, q in enumerate(test_mat):
        res = index.search(q, k)
        ids[i], dists[i] = res.ids, res.dists
    return ids, dists


def _tally_label(ids, dists, train_labels, rule) -> int:
    return tally_and_predict(ids, dists, train_labels[ids], rule).label


def _run_sweep(config, train, test_mat, test_labels) -> list:
    """Shared-prefix evaluation of every cell; no timings."""
    n_test = test_mat.shape[0]
    rules = [VoteRule.coerce(r) for r in config.rules]
    accuracy = {}  # (classifier, rule, k) -> percent

    exact = None  # lazily computed k_max prefixes, shared by knn and ahsp
    if {"knn", "ahsp"} & set(config.classifiers):
        exact = _exact_prefixes(train, test_mat, config.k_max)

    index = None
    approx = None
    if _INDEXED & set(config.classifiers):
        index = SmallWorldIndex.build(train, config.index_params)
        ef = config.index_params.ef_search
        approx = _approx_prefixes(index, test_mat, config.k_max, ef)

    for name in config.classifiers:
        if name == "hsp":
            correct = np.zeros(len(rules), dtype=np.int64)
            for i, q in enumerate(test_mat):
                nb = hsp_neighbors(train, q, None)
                labs = train.labels[nb.ids]
                for r, rule in enumerate(rules):
                    pred = tally_and_predict(nb.ids, nb.dists, labs, rule,
                                             neighborhood=nb)
                    correct[r] += pred.label == test_labels[i]
            for r, rule_name in enumerate(config.rules):
                accuracy[(name, rule_name, None)] = 100.0 * correct[r] / n_test
            continue

        if name in ("knn", "pknn"):
            pref_ids, pref_d = exact if name == "knn" else approx
            for k in range(config.k_min, config.k_max + 1):
                if name == "pknn" and k > pref_ids.shape[1]:
                    # beyond the shared beam: each k needs its own search
                    ids = np.empty((n_test, k), dtype=np.int64)
                    d = np.empty((n_test, k), dtype=np.float64)
                    for i, q in enumerate(test_mat):
                        res = index.search(q, k)
                        ids[i], d[i] = res.ids, res.dists
                else:
                    ids, d = pref_ids[:, :k], pref_d[:, :k]
                correct = np.zeros(len(rules), dtype=np.int64)
                for i in range(n_test):
                    for r, rule in enumerate(rules):
                        lab = _tally_label(ids[i], d[i], train.labels, rule)
                        correct[r] += lab == test_labels[i]
                for r, rule_name in enumerate(config.rules):
                    accuracy[(name, rule_name, k)] = 100.0 * correct[r] / n_test
            continue

        # ahsp / pahsp: half-space test inside each k-ball
        pref_ids = exact[0] if name == "ahsp" else approx[0]
        for k in range(config.k_min, config.k_max + 1):
            correct = np.zeros(len(rules), dtype=np.int64)
            for i, q in enumerate(test_mat):
                if name == "pahsp" and k > pref_ids.shape[1]:
                    ball = index.search(q, k).ids
                else:
                    ball = pref_ids[i, :k]
                nb = hsp_neighbors(train, q, ball)
                labs = train.labels[nb.ids]
                for r, rule in enumerate(rules):
                    pred = tally_and_predict(nb.ids, nb.dists, labs, rule,
                                             neighborhood=nb)
                    correct[r] += pred.label == test_labels[i]
            for r, rule_name in enumerate(config.rules):
                accuracy[(name, rule_name, k)] = 100.0 * correct[r] / n_test

    return [accuracy[cell] for cell in _cells(config)], None


def _run_direct(config, train, test_mat, test_labels):
    """One-shot classify per cell, timed.  Slower but cells are independent."""
    index = None
    if _INDEXED & set(config.classifiers):
        index = SmallWorldIndex.build(train, config.index_params)

    accuracies, timings = [], []
    for name, rule, k in _cells(config):
        t0 = time.perf_counter()
        correct = 0
        for i, q in enumerate(test_mat):
            if name == "knn":
                pred = classify_knn(train, q, k, rule)
            elif name == "pknn":
                pred = classify_probabilistic_knn(index, train, q, k, rule)
            elif name == "hsp":
                pred = classify_hsp(train, q, rule)
            elif name == "ahsp":
                pred = classify_asymptotic_hsp(train, q, k, rule)
            else:
                pred = classify_probabilistic_asymptotic_hsp(index, train, q, k, rule)
            correct += pred.label == test_labels[i]
        timings.append(1000.0 * (time.perf_counter() - t0))
        accuracies.append(100.0 * correct / test_mat.shape[0])
    return accuracies, timings


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    full = _load_full(config)
    train, test_mat, test_labels = split_dataset(full, config.test_count, config.seed)
    if config.k_max > train.n:
        raise DataError(
            f"k_max {config.k_max} exceeds the training size {train.n}"
        )

    if config.record_timings:
        accuracies, timings = _run_direct(config, train, test_mat, test_labels)
    else:
        accuracies, timings = _run_sweep(config, train, test_mat, test_labels)

    rows = []
    for j, (name, rule, k) in enumerate(_cells(config)):
        rows.append(ResultRow(
            classifier=name,
            rule=rule,
            k=k,
            accuracy=accuracies[j],
            n_test=test_mat.shape[0],
            n_train=train.n,
            dim=train.dim,
            seed=config.seed,
            elapsed_ms=None if timings is None else timings[j],
        ))
    return ExperimentReport(rows=tuple(rows), n_train=train.n,
                            n_test=test_mat.shape[0], dim=train.dim,
                            seed=config.seed)


def format_row(row: ResultRow) -> str:
    k = "" if row.k is None else str(row.k)
    ms = "" if row.elapsed_ms is None else f"{row.elapsed_ms:.3f}"
    return (f"{row.classifier},{row.rule},{k},{row.accuracy:.4f},"
            f"{row.n_test},{row.n_train},{row.dim},{row.seed},{ms}")


def report_to_csv(report: ExperimentReport) -> str:
    lines = [CSV_HEADER]
    lines.extend(format_row(row) for row in report.rows)
    return "\n".join(lines) + "\n"


def write_report_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_to_csv(report))


def accuracy_curve(report: ExperimentReport, classifier: str, rule: str):
    """(ks, accuracies) for one classifier/rule, sorted by k."""
    pairs = sorted((row.k, row.accuracy) for row in report.rows
                   if row.classifier == classifier and row.rule == rule
                   and row.k is not None)
    ks = np.array([p[0] for p in pairs], dtype=np.int64)
    accs = np.array([p[1] for p in pairs], dtype=np.float64)
    return ks, accs


def best_accuracy(report: ExperimentReport, classifier: str,
                  rule: str | None = None) -> float:
    """Best accuracy over k (and over rules when none is given)."""
    vals = [row.accuracy for row in report.rows
            if row.classifier == classifier
            and (rule is None or row.rule == rule)]
    if not vals:
        raise DataError(f"no rows for classifier {classifier!r}")
    return max(vals)


def summarize_max(report: ExperimentReport) -> dict:
    """Reduce to a (classifier, rule) -> maximum-accuracy grid."""
    best: dict = {}
    for row in report.rows:
        key = (row.classifier, row.rule)
        if key not in best or row.accuracy > best[key]:
            best[key] = row.accuracy
    return best


def total_variation(values) -> float:
    """Sum of |a[i+1] - a[i]|: how much a curve jitters across the sweep."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2:
        return 0.0
    return float(np.abs(np.diff(v)).sum())
