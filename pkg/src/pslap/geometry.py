"""Charge-labeled 3-D point clouds and their distance matrices.

Distances come in two flavours: plain Euclidean, and the bipartite
"interfacial" metric that keeps cross-set distances Euclidean but pushes
same-set pairs to +inf so that filtrations only ever build cross-set edges.
+inf is an ordinary distance value here, never a sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidPartition, OverlappingPoints

# Paired points closer than this (in Angstrom) are rejected: the product-of-
# distances simplex weight would vanish. Configurable per call.
DEFAULT_MIN_SEPARATION = 1e-9

EUCLIDEAN = "euclidean"
BIPARTITE_MODIFIED = "bipartite_modified"


@dataclass(frozen=True)
class LabeledPoint:
    """One atom: an id, 3-D coordinates (Angstrom), partial charge, element."""

    id: int
    coords: tuple[float, float, float]
    charge: float
    element: str = ""


class LabeledPointCloud:
    """Ordered, immutable collection of labeled points.

    Matrix rows/columns and simplex vertex indices refer to *row positions*
    in this cloud; point ids are carried along for provenance and for
    id-based specs such as bipartite partitions.
    """

    def __init__(self, points: Sequence[LabeledPoint]):
        if len(points) == 0:
            raise ValueError("point cloud must be nonempty")
        ids = [p.id for p in points]
        if len(set(ids)) != len(ids):
            raise ValueError("point ids must be unique within a cloud")
        self._points = tuple(points)
        self._coords = np.array([p.coords for p in points], dtype=np.float64)
        self._charges = np.array([p.charge for p in points], dtype=np.float64)
        if not np.all(np.isfinite(self._coords)):
            raise ValueError("coordinates must be finite")
        if not np.all(np.isfinite(self._charges)):
            raise ValueError("charges must be finite")
        self._row_of_id = {p.id: row for row, p in enumerate(points)}

    @classmethod
    def from_arrays(
        cls,
        coords: np.ndarray,
        charges: Optional[np.ndarray] = None,
        elements: Optional[Sequence[str]] = None,
        ids: Optional[Sequence[int]] = None,
    ) -> "LabeledPointCloud":
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 3:
            raise ValueError(f"coords must have shape (n, 3), got {coords.shape}")
        n = coords.shape[0]
        if charges is None:
            charges = np.ones(n)
        charges = np.asarray(charges, dtype=np.float64)
        if charges.shape != (n,):
            raise ValueError("charges must be a length-n vector")
        if elements is None:
            elements = [""] * n
        if ids is None:
            ids = range(n)
        points = [
            LabeledPoint(int(i), (float(c[0]), float(c[1]), float(c[2])), float(q), e)
            for i, c, q, e in zip(ids, coords, charges, elements)
        ]
        return cls(points)

    def __len__(self) -> int:
        return len(self._points)

    def __iter__(self):
        return iter(self._points)

    @property
    def points(self) -> tuple[LabeledPoint, ...]:
        return self._points

    @property
    def coords(self) -> np.ndarray:
        """(n, 3) float64 coordinate array (copy-safe view)."""
        return self._coords

    @property
    def charges(self) -> np.ndarray:
        return self._charges

    @property
    def ids(self) -> list[int]:
        return [p.id for p in self._points]

    def row_of(self, point_id: int) -> int:
        return self._row_of_id[point_id]

    def with_jitter(self, seed: int, amplitude: float = 1e-6) -> "LabeledPointCloud":
        """Deterministically perturb coordinates by uniform +-amplitude.

        Opt-in escape hatch for structure files with coincident atoms.
        """
        rng = np.random.default_rng(seed)
        shift = rng.uniform(-amplitude, amplitude, size=self._coords.shape)
        pts = [
            LabeledPoint(p.id, tuple(np.asarray(p.coords) + s), p.charge, p.element)
            for p, s in zip(self._points, shift)
        ]
        return LabeledPointCloud(pts)


@dataclass(frozen=True)
class DistanceSpec:
    """Which metric to use, plus the id partition for the bipartite one."""

    kind: str = EUCLIDEAN
    set_a: frozenset[int] = field(default_factory=frozenset)
    set_b: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, BIPARTITE_MODIFIED):
            raise ValueError(f"unknown distance kind: {self.kind!r}")

    @classmethod
    def euclidean(cls) -> "DistanceSpec":
        return cls(kind=EUCLIDEAN)

    @classmethod
    def bipartite(cls, set_a: Iterable[int], set_b: Iterable[int]) -> "DistanceSpec":
        return cls(kind=BIPARTITE_MODIFIED, set_a=frozenset(set_a), set_b=frozenset(set_b))


def euclidean_matrix(cloud: LabeledPointCloud) -> np.ndarray:
    """Plain (n, n) Euclidean distance matrix with an exactly-zero diagonal."""
    x = cloud.coords
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(dist, 0.0)
    return dist


def pairwise_distances(
    cloud: LabeledPointCloud,
    spec: DistanceSpec,
    min_separation: float = DEFAULT_MIN_SEPARATION,
) -> np.ndarray:
    """Distance matrix of `cloud` under `spec`.

    Euclidean: the usual metric. Bipartite-modified: Euclidean across the
    two sets, +inf within a set (diagonal stays 0). Raises OverlappingPoints
    when two distinct points sit within `min_separation`, and
    InvalidPartition when the bipartite sets are not a disjoint cover of
    the cloud's ids.
    """
    dist = euclidean_matrix(cloud)
    n = len(cloud)
    if n > 1:
        masked = dist.copy()
        np.fill_diagonal(masked, np.inf)
        if masked.min() <= min_separation:
            i, j = divmod(int(np.argmin(masked)), n)
            raise OverlappingPoints(
                f"points {cloud.points[i].id} and {cloud.points[j].id} are "
                f"{dist[i, j]:.3e} A apart (minimum {min_separation:.1e} A); "
                "apply with_jitter() for dirty inputs"
            )
    if spec.kind == EUCLIDEAN:
        return dist

    all_ids = set(cloud.ids)
    if spec.set_a & spec.set_b:
        raise InvalidPartition("bipartite sets overlap")
    if (spec.set_a | spec.set_b) != all_ids:
        raise InvalidPartition("bipartite sets must cover all cloud ids")
    in_a = np.array([p.id in spec.set_a for p in cloud], dtype=bool)
    same_set = in_a[:, None] == in_a[None, :]
    dist[same_set] = np.inf
    np.fill_diagonal(dist, 0.0)
    return dist
