"""Voting rules and label prediction from a neighborhood.

Three rules: plain majority, a linear distance taper that gives the nearest
neighbor weight 1 and the farthest weight 0, and inverse-distance weighting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, EmptyNeighborhoodError
from .hsp import Neighborhood

# an exactly-matching neighbor must dominate the inverse-distance vote
ZERO_DISTANCE_EPS = 1e-12


class VoteRule(enum.Enum):
    MAJORITY = "majority"
    DUDANI = "dudani"
    INVERSE_DISTANCE = "invdist"

    @classmethod
    def coerce(cls, rule) -> "VoteRule":
        if isinstance(rule, cls):
            return rule
        try:
            return cls(str(rule).lower())
        except ValueError:
            names = ", ".join(r.value for r in cls)
            raise ValueError(f"unknown vote rule {rule!r}; expected one of {names}")


@dataclass(frozen=True)
class Prediction:
    """Predicted class plus the per-class vote totals and the evidence used."""

    label: int
    votes: dict[int, float]
    neighborhood: object  # Neighborhood or KnnResult


def vote_weights(distances, rule) -> np.ndarray:
    """Per-neighbor vote weights for ascending distances.

    majority: all ones.  dudani: (d_far - d_j) / (d_far - d_near), all ones
    when every distance is equal.  invdist: 1/d_j with d_j = 0 clamped to
    1/ZERO_DISTANCE_EPS.
    """
    rule = VoteRule.coerce(rule)
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 1 or d.size == 0:
        raise ContractViolationError("distances must be a non-empty 1-D sequence")
    if np.any(np.diff(d) < 0):
        raise ContractViolationError("distances must be ascending")
    if rule is VoteRule.MAJORITY:
        return np.ones_like(d)
    if rule is VoteRule.DUDANI:
        d_near, d_far = d[0], d[-1]
        if d_far == d_near:
            return np.ones_like(d)
        return (d_far - d) / (d_far - d_near)
    safe = np.where(d == 0.0, 1.0, d)
    return np.where(d == 0.0, 1.0 / ZERO_DISTANCE_EPS, 1.0 / safe)


def resolve_winner(totals: np.ndarray, nearest_dist: np.ndarray) -> int:
    """Pick the winning class: max total, then nearest supporter, then id.

    ``totals`` and ``nearest_dist`` are indexed by class id; classes with no
    supporters must carry total 0 and nearest_dist = inf.
    """
    best = totals.max()
    tied = np.flatnonzero(totals == best)
    if tied.size == 1:
        return int(tied[0])
    supp = nearest_dist[tied]
    return int(tied[np.argmin(supp)])  # first minimum = smallest class id


def tally_and_predict(neighbor_ids, distances, labels, rule, neighborhood=None) -> Prediction:
    """Accumulate per-class vote weights and pick the winner.

    Ties go to the class whose nearest supporting neighbor is closest to the
    query, then to the smaller class id.
    """
    ids = np.asarray(neighbor_ids, dtype=np.int64)
    d = np.asarray(distances, dtype=np.float64)
    labs = np.asarray(labels, dtype=np.int64)
    if ids.size == 0:
        raise EmptyNeighborhoodError("cannot predict from an empty neighborhood")
    if not (ids.size == d.size == labs.size):
        raise ContractViolationError("ids, distances and labels must be parallel")

    w = vote_weights(d, rule)
    num_classes = int(labs.max()) + 1
    totals = np.zeros(num_classes)
    np.add.at(totals, labs, w)
    nearest = np.full(num_classes, np.inf)
    np.minimum.at(nearest, labs, d)
    label = resolve_winner(totals, nearest)

    if neighborhood is None:
        neighborhood = Neighborhood(ids=ids, dists=d)
    votes = {int(c): float(totals[c]) for c in np.unique(labs)}
    return Prediction(label=label, votes=votes, neighborhood=neighborhood)
