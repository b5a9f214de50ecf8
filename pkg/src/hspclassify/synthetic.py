"""Seeded synthetic datasets: Gaussian mixtures and a two-moons planar set.

Desk-scale stand-ins for precomputed deep-feature files; every draw is
reproducible from the spec's seed.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from .dataset import LabeledDataset
from .errors import DataError, FormatError

GAUSSIAN = "gaussian"
TWO_MOONS = "two_moons"


def parse_json_object(text: str, what: str) -> dict:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad {what} JSON: {exc}")
    if not isinstance(payload, dict):
        raise FormatError(f"{what} must be a JSON object")
    return payload


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = GAUSSIAN
    num_classes: int = 2
    points_per_class: int = 100
    dimension: int = 2
    class_separation: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, TWO_MOONS):
            raise DataError(f"unknown generator kind {self.kind!r}")
        if self.num_classes < 1 or self.points_per_class < 1 or self.dimension < 1:
            raise DataError("counts and dimension must be positive")
        if self.class_separation < 0:
            raise DataError("class_separation must be >= 0")
        if self.kind == TWO_MOONS and self.num_classes != 2:
            raise DataError("two_moons generates exactly 2 classes")
        if self.kind == TWO_MOONS and self.dimension < 2:
            raise DataError("two_moons needs dimension >= 2")

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        payload = parse_json_object(text, "generator spec")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise DataError(f"unknown generator spec fields: {', '.join(unknown)}")
        return cls(**payload)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def generate(spec: GeneratorSpec) -> LabeledDataset:
    if spec.kind == GAUSSIAN:
        return _gaussian_mixture(spec)
    return _two_moons(spec)


def _gaussian_mixture(spec: GeneratorSpec) -> LabeledDataset:
    """Class means at distance ``class_separation`` from the origin along
    independently drawn random directions (nearly orthogonal in high
    dimension), unit-variance spherical noise."""
    rng = np.random.default_rng(spec.seed)
    dirs = rng.standard_normal((spec.num_classes, spec.dimension))
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    means = spec.class_separation * dirs / norms
    labels = np.repeat(np.arange(spec.num_classes), spec.points_per_class)
    noise = rng.standard_normal((labels.size, spec.dimension))
    return LabeledDataset(means[labels] + noise, labels)


def _two_moons(spec: GeneratorSpec) -> LabeledDataset:
    """Two interleaving half-circles with 0.1 noise; ``class_separation``
    widens the vertical gap between the moons.  Extra dimensions beyond the
    plane are zero."""
    rng = np.random.default_rng(spec.seed)
    ppc = spec.points_per_class
    theta = rng.uniform(0.0, np.pi, size=2 * ppc)
    xy = np.empty((2 * ppc, 2))
    xy[:ppc, 0] = np.cos(theta[:ppc])
    xy[:ppc, 1] = np.sin(theta[:ppc])
    xy[ppc:, 0] = 1.0 - np.cos(theta[ppc:])
    xy[ppc:, 1] = 0.5 - np.sin(theta[ppc:]) - 0.25 * spec.class_separation
    xy += 0.1 * rng.standard_normal(xy.shape)
    points = np.zeros((2 * ppc, spec.dimension))
    points[:, :2] = xy
    labels = np.repeat(np.arange(2), ppc)
    return LabeledDataset(points, labels)
