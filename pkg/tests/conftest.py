import numpy as np
import pytest

from hspclassify import GeneratorSpec, IndexParams, build_index, generate


@pytest.fixture(scope="session")
def gaussian_data():
    """The standard mid-size test dataset: 4 classes, n=1000, dim 16."""
    spec = GeneratorSpec(kind="gaussian", num_classes=4, points_per_class=250,
                         dimension=16, class_separation=4.0, seed=11)
    return generate(spec)


@pytest.fixture(scope="session")
def gaussian_index(gaussian_data):
    """Default-parameter small-world index over the standard dataset."""
    return build_index(gaussian_data, IndexParams(seed=11))


@pytest.fixture(scope="session")
def gaussian_queries():
    rng = np.random.default_rng(77)
    return rng.standard_normal((100, 16))


@pytest.fixture
def tiny_points():
    """Nine 2D points in general position (no ties, no duplicates)."""
    rng = np.random.default_rng(3)
    return rng.random((9, 2)).astype(np.float32)
