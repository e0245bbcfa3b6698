"""Cellular sheaf on a labeled complex: stalks are the real line, and each
face relation acts by a scalar.

With the default simplex weight (product of all pairwise Euclidean
distances, weight(vertex) = 1) the vertex-to-edge scalar is
charge(other end) / edge length, and the edge-to-triangle scalar is
charge(opposite vertex) / (product of the two distances to it). Scalars
telescope along chains of face relations, so the composition rule holds
by construction for any nowhere-zero weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import NotAFace, ZeroF
from .filtration import FilteredComplex, Simplex
from .geometry import LabeledPointCloud, euclidean_matrix

PRODUCT_OF_PAIRWISE_DISTANCES = "product_of_pairwise_distances"
CONSTANT_ONE = "constant_one"


@dataclass(frozen=True)
class SheafWeighting:
    """Per-vertex charges plus the choice of nowhere-zero simplex weight."""

    charges: np.ndarray
    f_kind: str = PRODUCT_OF_PAIRWISE_DISTANCES

    def __post_init__(self):
        object.__setattr__(self, "charges", np.asarray(self.charges, dtype=np.float64))
        if self.f_kind not in (PRODUCT_OF_PAIRWISE_DISTANCES, CONSTANT_ONE):
            raise ValueError(f"unknown f_kind: {self.f_kind!r}")
        if not np.all(np.isfinite(self.charges)):
            raise ValueError("charges must be finite")

    @property
    def weighted(self) -> bool:
        return self.f_kind == PRODUCT_OF_PAIRWISE_DISTANCES

    @classmethod
    def trivial(cls, n: int) -> "SheafWeighting":
        """All charges 1 and constant weight: the plain simplicial complex."""
        return cls(charges=np.ones(n), f_kind=CONSTANT_ONE)


def simplex_weight(vertices: tuple[int, ...], euclid: np.ndarray, f_kind: str) -> float:
    """The nowhere-zero weight of a simplex (1 for vertices)."""
    if f_kind == CONSTANT_ONE:
        return 1.0
    w = 1.0
    for a in range(len(vertices)):
        for b in range(a + 1, len(vertices)):
            w *= euclid[vertices[a], vertices[b]]
    return w


def restriction_scalar(
    face: Simplex,
    coface: Simplex,
    cloud: LabeledPointCloud,
    w: SheafWeighting,
    euclid: Optional[np.ndarray] = None,
) -> float:
    """Scalar of the restriction map along face <= coface (any codimension):
    weight(face) * product of charges of the added vertices / weight(coface).
    Equal simplices give 1 (identity map)."""
    if face == coface:
        return 1.0
    if not set(face.vertices) <= set(coface.vertices):
        raise NotAFace(f"{face.vertices} is not a face of {coface.vertices}")
    if euclid is None:
        euclid = euclidean_matrix(cloud)
    denom = simplex_weight(coface.vertices, euclid, w.f_kind)
    if denom == 0.0 or not math.isfinite(denom):
        raise ZeroF(f"simplex weight of {coface.vertices} is {denom}")
    num = simplex_weight(face.vertices, euclid, w.f_kind)
    added = [v for v in coface.vertices if v not in face.vertices]
    for v in added:
        num *= w.charges[v]
    return num / denom


@dataclass
class CoboundaryMatrix:
    """Sparse coboundary from q-simplices (columns) to (q+1)-simplices (rows)
    of one filtration snapshot, in the complex's canonical per-dim order."""

    q: int
    matrix: sp.csr_matrix
    row_count: int
    col_count: int


def coboundary_matrix(
    fc: FilteredComplex,
    counts: tuple[int, ...],
    q: int,
    w: SheafWeighting,
    euclid: np.ndarray,
) -> CoboundaryMatrix:
    """Weighted coboundary of the snapshot given by per-dim prefix `counts`.

    Entry (coface row, face col) = incidence sign * restriction scalar.
    `euclid` must be the plain Euclidean matrix of the underlying cloud;
    simplex weights always use true lengths, whatever metric built `fc`.
    """
    if q not in (0, 1):
        raise ValueError("coboundary is assembled for q in {0, 1} only")
    n_rows = counts[q + 1] if q + 1 < len(counts) else 0
    n_cols = counts[q]
    charges = w.charges

    if q == 0:
        if n_rows == 0 or n_cols == 0:
            return CoboundaryMatrix(q, sp.csr_matrix((n_rows, n_cols)), n_rows, n_cols)
        u = fc.edges[:n_rows, 0]
        v = fc.edges[:n_rows, 1]
        val_u, val_v = kernels.d0_values(u, v, charges, euclid, w.weighted)
        _check_finite(val_u, val_v)
        rows = np.repeat(np.arange(n_rows, dtype=np.int64), 2)
        cols = np.stack([u, v], axis=1).ravel()
        data = np.stack([val_u, val_v], axis=1).ravel()
    else:
        if n_rows == 0 or n_cols == 0:
            return CoboundaryMatrix(q, sp.csr_matrix((n_rows, n_cols)), n_rows, n_cols)
        i = fc.tris[:n_rows, 0]
        j = fc.tris[:n_rows, 1]
        k = fc.tris[:n_rows, 2]
        val_jk, val_ik, val_ij = kernels.d1_values(i, j, k, charges, euclid, w.weighted)
        _check_finite(val_jk, val_ik, val_ij)
        col_jk = fc.edge_positions(j, k)
        col_ik = fc.edge_positions(i, k)
        col_ij = fc.edge_positions(i, j)
        rows = np.repeat(np.arange(n_rows, dtype=np.int64), 3)
        cols = np.stack([col_jk, col_ik, col_ij], axis=1).ravel()
        data = np.stack([val_jk, val_ik, val_ij], axis=1).ravel()

    mat = sp.csr_matrix((data, (rows, cols)), shape=(n_rows, n_cols))
    return CoboundaryMatrix(q, mat, n_rows, n_cols)


def _check_finite(*arrays: np.ndarray):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise ZeroF("restriction scalar overflowed (simplex weight underflow?)")


@dataclass
class CompositionReport:
    """Outcome of verifying scalar composition along all face chains."""

    checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_composition(
    cloud: LabeledPointCloud,
    w: SheafWeighting,
    fc: FilteredComplex,
    rtol: float = 1e-12,
) -> CompositionReport:
    """Verify scalar(rho<=tau) == scalar(sigma<=tau) * scalar(rho<=sigma)
    over every vertex <= edge <= triangle chain in the complex (plus the
    degenerate equal-simplex cases), within rtol*(1+|direct|)."""
    euclid = euclidean_matrix(cloud)
    report = CompositionReport(checked=0)

    def check(rho: Simplex, sigma: Simplex, tau: Simplex):
        direct = restriction_scalar(rho, tau, cloud, w, euclid)
        two_step = restriction_scalar(sigma, tau, cloud, w, euclid) * restriction_scalar(
            rho, sigma, cloud, w, euclid
        )
        report.checked += 1
        if abs(direct - two_step) > rtol * (1.0 + abs(direct)):
            report.violations.append(
                {
                    "rho": rho.vertices,
                    "sigma": sigma.vertices,
                    "tau": tau.vertices,
                    "direct": direct,
                    "composed": two_step,
                }
            )

    for tri in fc.tris:
        tau = Simplex(tuple(int(x) for x in tri))
        for drop in range(3):
            sigma = Simplex(tau.vertices[:drop] + tau.vertices[drop + 1 :])
            for v in sigma.vertices:
                check(Simplex((v,)), sigma, tau)
            check(sigma, sigma, tau)  # degenerate rho == sigma
            check(sigma, tau, tau)  # degenerate sigma == tau
    for e in fc.edges:
        sigma = Simplex(tuple(int(x) for x in e))
        for v in sigma.vertices:
            check(Simplex((v,)), Simplex((v,)), sigma)
    return report
