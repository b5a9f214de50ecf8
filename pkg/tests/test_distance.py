"""Distance kernel: values, symmetry, triangle inequality, dtype contract."""

import numpy as np
import pytest

from hspclassify import DimensionMismatchError, distance, dists_to, sq_dists_to

from oracles import naive_distance


def test_zero_for_identical_points():
    assert distance((0.0, 0.0), (0.0, 0.0)) == 0.0


def test_three_four_five():
    assert distance((0.0, 0.0), (3.0, 4.0)) == 5.0


def test_matches_scalar_loop_at_high_dim():
    rng = np.random.default_rng(42)
    a = rng.standard_normal(512)
    b = rng.standard_normal(512)
    got = distance(a, b)
    want = naive_distance(a, b)
    assert got == pytest.approx(want, rel=1e-6)


def test_symmetry_exact():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.standard_normal(8)
        b = rng.standard_normal(8)
        assert distance(a, b) == distance(b, a)


def test_triangle_inequality():
    rng = np.random.default_rng(2)
    pts = rng.standard_normal((60, 16))
    for _ in range(200):
        i, j, k = rng.integers(0, 60, size=3)
        dij = distance(pts[i], pts[j])
        dik = distance(pts[i], pts[k])
        dkj = distance(pts[k], pts[j])
        assert dij <= dik + dkj + 1e-9 * max(dij, 1.0)


def test_self_distance_zero_over_dataset():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((20, 5)).astype(np.float32)
    d = dists_to(pts, pts[7].astype(np.float64))
    assert d[7] == 0.0


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionMismatchError):
        distance((1.0, 2.0), (1.0, 2.0, 3.0))


def test_sq_dists_accumulates_in_float64():
    # float32 storage, float64 accumulation: at dim 2048 a float32
    # accumulator would lose several digits
    rng = np.random.default_rng(4)
    vecs = rng.standard_normal((4, 2048)).astype(np.float32)
    q = vecs[0].astype(np.float64)
    got = sq_dists_to(vecs, q)
    assert got.dtype == np.float64
    want = np.array([naive_distance(v, q) ** 2 for v in vecs])
    np.testing.assert_allclose(got, want, rtol=1e-9)
