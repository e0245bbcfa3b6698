import numpy as np
import pytest
from scipy.spatial.distance import cdist

from pslap.errors import InvalidPartition, OverlappingPoints
from pslap.geometry import (
    DistanceSpec,
    LabeledPoint,
    LabeledPointCloud,
    euclidean_matrix,
    pairwise_distances,
)

from conftest import random_cloud


def test_cloud_basic_accessors():
    cloud = LabeledPointCloud.from_arrays(
        np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]]),
        np.array([1.0, -0.5]),
        elements=["C", "N"],
        ids=[10, 20],
    )
    assert len(cloud) == 2
    assert cloud.ids == [10, 20]
    assert cloud.row_of(20) == 1
    assert cloud.points[1].element == "N"
    assert cloud.charges.tolist() == [1.0, -0.5]


def test_cloud_default_charges_are_one():
    cloud = LabeledPointCloud.from_arrays(np.zeros((3, 3)) + np.arange(3)[:, None])
    assert cloud.charges.tolist() == [1.0, 1.0, 1.0]


def test_cloud_rejects_duplicate_ids():
    pts = [LabeledPoint(1, (0.0, 0.0, 0.0), 1.0), LabeledPoint(1, (1.0, 0.0, 0.0), 1.0)]
    with pytest.raises(ValueError):
        LabeledPointCloud(pts)


def test_cloud_rejects_nonfinite():
    with pytest.raises(ValueError):
        LabeledPointCloud.from_arrays(np.array([[0.0, 0.0, np.nan]]))
    with pytest.raises(ValueError):
        LabeledPointCloud.from_arrays(np.zeros((1, 3)), np.array([np.inf]))


def test_cloud_rejects_empty():
    with pytest.raises(ValueError):
        LabeledPointCloud([])


def test_euclidean_matrix_against_cdist():
    rng = np.random.default_rng(42)
    for _ in range(20):
        cloud = random_cloud(rng, int(rng.integers(2, 15)))
        got = euclidean_matrix(cloud)
        want = cdist(cloud.coords, cloud.coords)
        assert np.allclose(got, want, atol=1e-12)
        assert np.array_equal(got, got.T)
        assert np.all(np.diagonal(got) == 0.0)


def test_pairwise_euclidean_matches_matrix():
    rng = np.random.default_rng(3)
    cloud = random_cloud(rng, 8)
    spec = DistanceSpec.euclidean()
    assert np.array_equal(pairwise_distances(cloud, spec), euclidean_matrix(cloud))


def test_overlapping_points_rejected():
    cloud = LabeledPointCloud.from_arrays(np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))
    with pytest.raises(OverlappingPoints):
        pairwise_distances(cloud, DistanceSpec.euclidean())


def test_bipartite_metric_pattern():
    coords = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 2, 0], [1.0, 2, 0]])
    cloud = LabeledPointCloud.from_arrays(coords)
    spec = DistanceSpec.bipartite({0, 1}, {2, 3})
    d = pairwise_distances(cloud, spec)
    assert d[0, 1] == np.inf and d[2, 3] == np.inf
    assert d[0, 2] == 2.0 and d[1, 3] == 2.0
    assert np.all(np.diagonal(d) == 0.0)
    assert np.array_equal(d, d.T)


def test_bipartite_partition_must_cover():
    cloud = LabeledPointCloud.from_arrays(np.arange(9, dtype=float).reshape(3, 3))
    with pytest.raises(InvalidPartition):
        pairwise_distances(cloud, DistanceSpec.bipartite({0}, {1}))  # point 2 unassigned
    with pytest.raises(InvalidPartition):
        pairwise_distances(cloud, DistanceSpec.bipartite({0, 1}, {1, 2}))  # overlap


def test_jitter_deterministic_and_bounded():
    rng = np.random.default_rng(7)
    cloud = random_cloud(rng, 6)
    a = cloud.with_jitter(seed=5, amplitude=1e-4)
    b = cloud.with_jitter(seed=5, amplitude=1e-4)
    c = cloud.with_jitter(seed=6, amplitude=1e-4)
    assert np.array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, c.coords)
    assert np.max(np.abs(a.coords - cloud.coords)) <= 1e-4
    assert np.array_equal(a.charges, cloud.charges)
