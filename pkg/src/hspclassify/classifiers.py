"""The five instance-based classifiers, as functions and as estimators.

Functions operate on a LabeledDataset and a single query; the estimator
classes at the bottom wrap them behind the scikit-learn fit/predict
contract so they compose with pipelines and model selection.

Self-exclusion: when a query is a FeatureVector carrying its dataset
ordinal, that id is dropped from the candidates; for a bare vector every
stored point with exactly identical components is dropped.  The default is
to exclude only when the query is a stored FeatureVector.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .dataset import FeatureVector, LabeledDataset, check_matrix
from .errors import DimensionMismatchError, EmptyDatasetError
from .hsp import hsp_neighbors
from .index import IndexParams, SmallWorldIndex
from .knn import knn_search
from .voting import Prediction, VoteRule, tally_and_predict


def _self_ids(dataset: LabeledDataset, query, exclude_self) -> np.ndarray | None:
    """Resolve the ids to drop for self-exclusion (None when disabled)."""
    is_member = isinstance(query, FeatureVector) and 0 <= query.id < dataset.n
    if exclude_self is None:
        exclude_self = is_member
    if not exclude_self:
        return None
    if is_member:
        return np.array([query.id], dtype=np.int64)
    q32 = np.asarray(
        query.components if isinstance(query, FeatureVector) else query,
        dtype=np.float32,
    ).ravel()
    matches = np.flatnonzero(np.all(dataset.vectors == q32, axis=1))
    return matches if matches.size else None


def classify_knn(dataset: LabeledDataset, query, k: int,
                 rule=VoteRule.MAJORITY, exclude_self=None) -> Prediction:
    """Vote over the exact k nearest neighbors."""
    exclude = _self_ids(dataset, query, exclude_self)
    result = knn_search(dataset, query, k, exclude=exclude)
    return tally_and_predict(result.ids, result.dists,
                             dataset.labels[result.ids], rule,
                             neighborhood=result)


def classify_probabilistic_knn(index: SmallWorldIndex, dataset: LabeledDataset,
                               query, k: int, rule=VoteRule.MAJORITY,
                               ef_search: int | None = None) -> Prediction:
    """Vote over approximate k nearest neighbors from the small-world index."""
    result = index.search(query, k, ef_search)
    return tally_and_predict(result.ids, result.dists,
                             dataset.labels[result.ids], rule,
                             neighborhood=result)


def classify_hsp(dataset: LabeledDataset, query,
                 rule=VoteRule.MAJORITY, exclude_self=None) -> Prediction:
    """Vote over the half-space proximal neighborhood of the whole dataset.

    No neighborhood-size parameter exists: the test itself decides how many
    neighbors the query gets.
    """
    if dataset.n == 0:
        raise EmptyDatasetError("cannot classify against an empty dataset")
    exclude = _self_ids(dataset, query, exclude_self)
    cand = np.arange(dataset.n, dtype=np.int64)
    if exclude is not None:
        cand = np.setdiff1d(cand, exclude, assume_unique=True)
    nb = hsp_neighbors(dataset, query, cand)
    return tally_and_predict(nb.ids, nb.dists, dataset.labels[nb.ids], rule,
                             neighborhood=nb)


def classify_asymptotic_hsp(dataset: LabeledDataset, query, k: int,
                            rule=VoteRule.MAJORITY, exclude_self=None) -> Prediction:
    """Half-space proximal test restricted to the exact k-nearest ball."""
    exclude = _self_ids(dataset, query, exclude_self)
    ball = knn_search(dataset, query, k, exclude=exclude)
    nb = hsp_neighbors(dataset, query, ball.ids)
    return tally_and_predict(nb.ids, nb.dists, dataset.labels[nb.ids], rule,
                             neighborhood=nb)


def classify_probabilistic_asymptotic_hsp(index: SmallWorldIndex,
                                          dataset: LabeledDataset, query,
                                          k: int, rule=VoteRule.MAJORITY,
                                          ef_search: int | None = None) -> Prediction:
    """Half-space proximal test restricted to an approximate k-nearest ball."""
    ball = index.search(query, k, ef_search)
    nb = hsp_neighbors(dataset, query, ball.ids)
    return tally_and_predict(nb.ids, nb.dists, dataset.labels[nb.ids], rule,
                             neighborhood=nb)


# -- scikit-learn estimators ----------------------------------------------


class _NeighborVoteClassifier(BaseEstimator, ClassifierMixin):
    """Shared fit/predict plumbing for the neighbor-vote classifiers."""

    def fit(self, X, y):
        X = check_matrix(X, "X")
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise EmptyDatasetError("cannot fit on an empty training set")
        self.classes_, encoded = np.unique(y, return_inverse=True)
        self.dataset_ = LabeledDataset(X, encoded)
        self.n_features_in_ = self.dataset_.dim
        self._post_fit()
        return self

    def _post_fit(self):
        pass

    def _predict_one(self, query) -> int:
        raise NotImplementedError

    def _check_predict_input(self, X) -> np.ndarray:
        if not hasattr(self, "dataset_"):
            raise EmptyDatasetError("estimator is not fitted yet; call fit first")
        X = check_matrix(X, "X")
        if X.shape[0] and X.shape[1] != self.n_features_in_:
            raise DimensionMismatchError(
                f"X has {X.shape[1]} features, estimator was fitted with "
                f"{self.n_features_in_}"
            )
        return X

    def predict(self, X):
        X = self._check_predict_input(X)
        encoded = [self._predict_one(row) for row in X]
        return self.classes_[np.asarray(encoded, dtype=np.int64)]

    def predictions(self, X):
        """Full Prediction records (votes and the neighborhood used)."""
        X = self._check_predict_input(X)
        return [self._predict_full(row) for row in X]

    def _predict_full(self, query) -> Prediction:
        raise NotImplementedError


class KnnClassifier(_NeighborVoteClassifier):
    """Exact k-nearest-neighbor voting classifier."""

    def __init__(self, k=15, rule="majority"):
        self.k = k
        self.rule = rule

    def _predict_full(self, query):
        return classify_knn(self.dataset_, query, self.k,
                            VoteRule.coerce(self.rule), exclude_self=False)

    def _predict_one(self, query):
        return self._predict_full(query).label


class HspClassifier(_NeighborVoteClassifier):
    """Parameter-free classifier voting over the half-space proximal
    neighborhood drawn from the entire training set."""

    def __init__(self, rule="majority"):
        self.rule = rule

    def _predict_full(self, query):
        return classify_hsp(self.dataset_, query,
                            VoteRule.coerce(self.rule), exclude_self=False)

    def _predict_one(self, query):
        return self._predict_full(query).label


class AsymptoticHspClassifier(_NeighborVoteClassifier):
    """Half-space proximal vote inside the exact k-nearest ball."""

    def __init__(self, k=100, rule="majority"):
        self.k = k
        self.rule = rule

    def _predict_full(self, query):
        return classify_asymptotic_hsp(self.dataset_, query, self.k,
                                       VoteRule.coerce(self.rule),
                                       exclude_self=False)

    def _predict_one(self, query):
        return self._predict_full(query).label


class _IndexedMixin:
    """Builds the small-world index after fit for the probabilistic variants."""

    def _index_params(self) -> IndexParams:
        return IndexParams(
            max_neighbors=self.max_neighbors,
            ef_construction=self.ef_construction,
            ef_search=self.ef_search,
            seed=self.seed,
        )

    def _post_fit(self):
        self.index_ = SmallWorldIndex.build(self.dataset_, self._index_params())


class ProbabilisticKnnClassifier(_IndexedMixin, _NeighborVoteClassifier):
    """k-nearest-neighbor vote with candidates from a small-world index."""

    def __init__(self, k=15, rule="majority", max_neighbors=16,
                 ef_construction=200, ef_search=100, seed=0):
        self.k = k
        self.rule = rule
        self.max_neighbors = max_neighbors
        self.ef_construction = ef_construction
        self.ef_search = ef_search
        self.seed = seed

    def _predict_full(self, query):
        return classify_probabilistic_knn(self.index_, self.dataset_, query,
                                          self.k, VoteRule.coerce(self.rule))

    def _predict_one(self, query):
        return self._predict_full(query).label


class ProbabilisticAsymptoticHspClassifier(_IndexedMixin, _NeighborVoteClassifier):
    """Half-space proximal vote inside an approximate k-nearest ball."""

    def __init__(self, k=100, rule="majority", max_neighbors=16,
                 ef_construction=200, ef_search=100, seed=0):
        self.k = k
        self.rule = rule
        self.max_neighbors = max_neighbors
        self.ef_construction = ef_construction
        self.ef_search = ef_search
        self.seed = seed

    def _predict_full(self, query):
        return classify_probabilistic_asymptotic_hsp(
            self.index_, self.dataset_, query, self.k,
            VoteRule.coerce(self.rule))

    def _predict_one(self, query):
        return self._predict_full(query).label
