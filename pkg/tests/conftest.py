import os

import numpy as np
import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def wt_path():
    return os.path.join(FIXTURES, "micro_wt.pqr")


@pytest.fixture
def mt_path():
    return os.path.join(FIXTURES, "micro_mt.pqr")


def random_cloud(rng: np.random.Generator, n: int, box: float = 8.0, min_sep: float = 1e-2):
    """Random well-separated cloud in a box; rejection-samples until no
    two points are closer than min_sep."""
    from pslap.geometry import LabeledPointCloud

    while True:
        coords = rng.uniform(0.0, box, size=(n, 3))
        d = np.linalg.norm(coords[:, None] - coords[None, :], axis=-1)
        if np.min(d[~np.eye(n, dtype=bool)]) > min_sep:
            break
    charges = rng.uniform(-1.0, 1.0, size=n)
    charges[np.abs(charges) < 1e-3] = 0.25
    return LabeledPointCloud.from_arrays(coords, charges)
