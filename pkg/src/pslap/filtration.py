"""Filtered simplicial complexes: Vietoris-Rips and Alpha constructions.

Conventions fixed here (and recorded in each complex's metadata):
  * VR entry scale = simplex diameter (max pairwise distance).
  * Alpha values use the radius convention (circumradius of the smallest
    empty circumsphere, Gabriel-corrected so faces never outlive cofaces),
    keeping VR and Alpha axes in the same length units.
  * Orientation: vertices ascending; [face : coface] = (-1)^k where the
    coface's k-th vertex (0-based) is the one missing from the face.
  * All 0-simplices enter at value 0; max dimension is capped at 2.

Simplices of each dimension are stored sorted by (value, vertex tuple),
so every filtration snapshot is a per-dimension prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy.spatial import Delaunay, QhullError

from . import kernels
from .errors import DegenerateInput, DimensionMismatch, NotAFace
from .geometry import LabeledPointCloud

VR = "VR"
ALPHA = "Alpha"

# Singular values below this fraction of the largest are treated as zero
# when deciding the affine rank of a point set.
_RANK_RTOL = 1e-9


@dataclass(frozen=True)
class Simplex:
    """A simplex as a strictly increasing tuple of vertex indices."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) == 0:
            raise ValueError("empty simplex")
        if any(a >= b for a, b in zip(self.vertices, self.vertices[1:])):
            raise ValueError(f"vertices must be strictly increasing: {self.vertices}")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


def signed_incidence(face: Simplex, coface: Simplex) -> int:
    """Sign of the face relation: (-1)^k with k the position (0-based) of
    the coface vertex absent from the face. Raises NotAFace otherwise."""
    if coface.dim != face.dim + 1:
        raise NotAFace(f"{face.vertices} is not a codim-1 face of {coface.vertices}")
    missing = set(coface.vertices) - set(face.vertices)
    if len(missing) != 1 or not set(face.vertices) <= set(coface.vertices):
        raise NotAFace(f"{face.vertices} is not a codim-1 face of {coface.vertices}")
    k = coface.vertices.index(missing.pop())
    return -1 if k % 2 else 1


class FilteredComplex:
    """Simplices up to dim 2 with filtration values, sorted per dimension."""

    def __init__(
        self,
        kind: str,
        n_points: int,
        max_dim: int,
        edges: np.ndarray,
        edge_vals: np.ndarray,
        tris: np.ndarray,
        tri_vals: np.ndarray,
        metadata: Optional[dict] = None,
    ):
        self.kind = kind
        self.n_points = int(n_points)
        self.max_dim = int(max_dim)
        order_e = np.lexsort((edges[:, 1], edges[:, 0], edge_vals)) if len(edge_vals) else np.empty(0, dtype=np.intp)
        self.edges = np.asarray(edges, dtype=np.int64)[order_e]
        self.edge_vals = np.asarray(edge_vals, dtype=np.float64)[order_e]
        order_t = (
            np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0], tri_vals)) if len(tri_vals) else np.empty(0, dtype=np.intp)
        )
        self.tris = np.asarray(tris, dtype=np.int64)[order_t]
        self.tri_vals = np.asarray(tri_vals, dtype=np.float64)[order_t]
        self.metadata = dict(metadata or {})
        self._edge_keys: Optional[np.ndarray] = None
        self._edge_order: Optional[np.ndarray] = None

    def num(self, q: int) -> int:
        if q == 0:
            return self.n_points
        if q == 1:
            return len(self.edge_vals)
        if q == 2:
            return len(self.tri_vals)
        return 0

    def values(self, q: int) -> np.ndarray:
        if q == 0:
            return np.zeros(self.n_points)
        if q == 1:
            return self.edge_vals
        if q == 2:
            return self.tri_vals
        return np.empty(0)

    def vertex_array(self, q: int) -> np.ndarray:
        """(n_q, q+1) array of vertex indices for dimension q."""
        if q == 0:
            return np.arange(self.n_points, dtype=np.int64)[:, None]
        if q == 1:
            return self.edges
        if q == 2:
            return self.tris
        return np.empty((0, q + 1), dtype=np.int64)

    def counts_at(self, t: float) -> tuple[int, ...]:
        """Per-dimension count of simplices with value <= t (prefix sizes)."""
        out = [int(self.n_points) if t >= 0.0 else 0]
        if self.max_dim >= 1:
            out.append(int(np.searchsorted(self.edge_vals, t, side="right")))
        if self.max_dim >= 2:
            out.append(int(np.searchsorted(self.tri_vals, t, side="right")))
        while len(out) <= 2:
            out.append(0)
        return tuple(out)

    def max_value(self) -> float:
        vals = [0.0]
        if len(self.edge_vals):
            vals.append(float(self.edge_vals[-1]))
        if len(self.tri_vals):
            vals.append(float(self.tri_vals[-1]))
        return max(vals)

    def edge_positions(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Positions in the sorted edge table of the edges (u[i], v[i])."""
        if self._edge_keys is None:
            keys = self.edges[:, 0] * self.n_points + self.edges[:, 1]
            self._edge_order = np.argsort(keys, kind="stable")
            self._edge_keys = keys[self._edge_order]
        query = u * self.n_points + v
        pos = np.searchsorted(self._edge_keys, query)
        if len(self._edge_keys):
            ok = (pos < len(self._edge_keys)) & (self._edge_keys[np.minimum(pos, len(self._edge_keys) - 1)] == query)
        else:
            ok = np.zeros(len(query), dtype=bool)
        if not np.all(ok):
            raise DimensionMismatch("triangle references an edge missing from the complex")
        return self._edge_order[pos]

    def iter_simplices(self) -> Iterator[tuple[Simplex, float]]:
        for i in range(self.n_points):
            yield Simplex((i,)), 0.0
        for e, val in zip(self.edges, self.edge_vals):
            yield Simplex(tuple(int(x) for x in e)), float(val)
        for tri, val in zip(self.tris, self.tri_vals):
            yield Simplex(tuple(int(x) for x in tri)), float(val)


@dataclass(frozen=True)
class SnapshotPair:
    """Nested snapshots K (value <= t_small) inside L (value <= t_large)."""

    complex: FilteredComplex
    t_small: float
    t_large: float
    k_counts: tuple[int, ...] = field(default=())
    l_counts: tuple[int, ...] = field(default=())

    def k_count(self, q: int) -> int:
        return self.k_counts[q] if q >= 0 and q < len(self.k_counts) else 0

    def l_count(self, q: int) -> int:
        return self.l_counts[q] if q >= 0 and q < len(self.l_counts) else 0


def snapshot_pair(fc: FilteredComplex, t: float, delta: float = 0.0) -> SnapshotPair:
    """Snapshot pair at thresholds (t, t + delta); K is a prefix of L."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return SnapshotPair(
        complex=fc,
        t_small=float(t),
        t_large=float(t + delta),
        k_counts=fc.counts_at(t),
        l_counts=fc.counts_at(t + delta),
    )


def build_vr(dist: np.ndarray, max_dim: int = 2, max_scale: float = np.inf) -> FilteredComplex:
    """Vietoris-Rips complex from a distance matrix (diameter convention).

    A simplex enters at its largest pairwise distance; any pair at +inf
    (e.g. same-set pairs under the bipartite metric) kills the simplex.
    """
    dist = np.asarray(dist, dtype=np.float64)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise DimensionMismatch(f"distance matrix must be square, got {dist.shape}")
    if not np.array_equal(dist, dist.T):
        raise DimensionMismatch("distance matrix must be symmetric")
    if np.any(np.diagonal(dist) != 0.0):
        raise DimensionMismatch("distance matrix must have a zero diagonal")
    if not 0 <= max_dim <= 2:
        raise ValueError("max_dim must be 0, 1, or 2")

    n = dist.shape[0]
    if max_dim >= 1:
        u, v, e_vals = kernels.vr_edges(dist, max_scale)
        edges = np.stack([u, v], axis=1) if len(u) else np.empty((0, 2), dtype=np.int64)
    else:
        edges, e_vals = np.empty((0, 2), dtype=np.int64), np.empty(0)
    if max_dim >= 2:
        i, j, k, t_vals = kernels.vr_triangles(dist, max_scale)
        tris = np.stack([i, j, k], axis=1) if len(i) else np.empty((0, 3), dtype=np.int64)
    else:
        tris, t_vals = np.empty((0, 3), dtype=np.int64), np.empty(0)

    return FilteredComplex(
        kind=VR,
        n_points=n,
        max_dim=max_dim,
        edges=edges,
        edge_vals=e_vals,
        tris=tris,
        tri_vals=t_vals,
        metadata={"scale_convention": "diameter", "max_scale": float(max_scale)},
    )


def _circumsphere(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and squared radius of the sphere through all rows of `pts`,
    with center constrained to their affine hull."""
    base = pts[0]
    a = pts[1:] - base
    gram = a @ a.T
    rhs = 0.5 * np.einsum("ij,ij->i", a, a)
    try:
        x = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        x = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    offset = a.T @ x
    return base + offset, float(offset @ offset)


def _affine_rank_basis(coords: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    """Affine rank of a point set plus an isometric projection onto it."""
    center = coords.mean(axis=0)
    centered = coords - center
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[0] == 0.0:
        return 0, centered, vt
    rank = int(np.sum(s > _RANK_RTOL * s[0]))
    return rank, centered @ vt[:rank].T, vt


def _delaunay_cells(pts: np.ndarray, ndim: int) -> np.ndarray:
    tri = Delaunay(pts[:, :ndim])
    return np.sort(tri.simplices, axis=1)


def build_alpha(cloud: LabeledPointCloud) -> FilteredComplex:
    """Alpha complex (radius convention) of a cloud under Euclidean distance.

    Uses the Delaunay triangulation at the point set's affine rank, so
    collinear/coplanar inputs degrade to the 1-D/2-D construction instead
    of failing. Tetrahedra participate in the filtration-value propagation
    but are dropped from the output (max_dim = 2).
    """
    n = len(cloud)
    if n < 2:
        raise DegenerateInput("alpha complex needs at least 2 points")

    rank, proj, _ = _affine_rank_basis(cloud.coords)
    if rank == 0:
        raise DegenerateInput("all points coincide")

    cells = None
    if n >= rank + 1 and rank >= 2:
        for r in range(rank, 1, -1):
            try:
                cells = _delaunay_cells(proj, r)
                rank = r
                break
            except QhullError:
                continue
    if cells is None:
        # collinear (or Qhull rejected everything): chain of consecutive points
        rank = 1
        order = np.argsort(proj[:, 0], kind="stable")
        cells = np.sort(np.stack([order[:-1], order[1:]], axis=1), axis=1)

    pts = proj[:, :rank]

    # Gather faces of every dimension 1..rank (vertices handled separately).
    by_dim: dict[int, list[tuple[int, ...]]] = {d: [] for d in range(1, rank + 1)}
    seen: set[tuple[int, ...]] = set()

    def add_faces(simplex: tuple[int, ...]):
        d = len(simplex) - 1
        if d == 0:
            return
        if simplex not in seen:
            seen.add(simplex)
            by_dim[d].append(simplex)
            for idx in range(len(simplex)):
                add_faces(simplex[:idx] + simplex[idx + 1 :])

    for cell in cells:
        add_faces(tuple(int(x) for x in cell))

    for d in by_dim:
        by_dim[d].sort()

    # Standard alpha-value assignment on squared radii: own circumradius for
    # untouched simplices, min-propagation plus the Gabriel test downward.
    circum: dict[tuple[int, ...], tuple[np.ndarray, float]] = {}

    def circumsphere(s: tuple[int, ...]) -> tuple[np.ndarray, float]:
        got = circum.get(s)
        if got is None:
            got = _circumsphere(pts[list(s)])
            circum[s] = got
        return got

    val2: dict[tuple[int, ...], float] = {}
    for d in range(rank, 0, -1):
        for s in by_dim[d]:
            if s not in val2:
                val2[s] = circumsphere(s)[1]
            for idx in range(len(s)):
                f = s[:idx] + s[idx + 1 :]
                if len(f) == 1:
                    continue
                if f in val2:
                    val2[f] = min(val2[f], val2[s])
                else:
                    center, r2 = circumsphere(f)
                    gap = pts[s[idx]] - center
                    if float(gap @ gap) < r2:  # facet not Gabriel: inherit
                        val2[f] = val2[s]

    # Monotonicity clamp (top-down): floating-point-proof face ordering.
    for d in range(rank, 1, -1):
        for s in by_dim[d]:
            for idx in range(len(s)):
                f = s[:idx] + s[idx + 1 :]
                if val2[f] > val2[s]:
                    val2[f] = val2[s]

    edges = np.array(by_dim.get(1, []), dtype=np.int64).reshape(-1, 2)
    e_vals = np.sqrt(np.array([val2[tuple(e)] for e in edges], dtype=np.float64))
    tri_list = by_dim.get(2, [])
    tris = np.array(tri_list, dtype=np.int64).reshape(-1, 3)
    t_vals = np.sqrt(np.array([val2[tuple(t)] for t in tri_list], dtype=np.float64))

    return FilteredComplex(
        kind=ALPHA,
        n_points=n,
        max_dim=2,
        edges=edges,
        edge_vals=e_vals,
        tris=tris,
        tri_vals=t_vals,
        metadata={"scale_convention": "radius", "delaunay_rank": rank},
    )


def dump_complex(fc: FilteredComplex) -> str:
    """Line-oriented debug dump: `dim v0 v1 ... value`, ascending by
    (value, dim, vertices); byte-stable for golden tests."""
    rows = []
    for simplex, value in fc.iter_simplices():
        rows.append((value, simplex.dim, simplex.vertices))
    rows.sort()
    lines = [f"{dim} {' '.join(str(v) for v in verts)} {value!r}" for value, dim, verts in rows]
    return "\n".join(lines) + ("\n" if lines else "")
