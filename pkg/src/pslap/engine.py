"""Persistent sheaf Laplacian assembly and spectral sweeps.

For a snapshot pair K <= L at cochain degree q the operator is

    up   = M M^T,  M = (rows of D_L^T for K's q-simplices) Z,
    down = D_K^{q-1} (D_K^{q-1})^T   (zero when q == 0),

where D are weighted coboundaries and Z is an orthonormal basis of the
subspace of (q+1)-cochains of L whose adjoint image has no component on
the q-simplices of L minus K. With delta = 0 (K == L) the subspace is
everything and the operator reduces to the ordinary sheaf Laplacian.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, NonSymmetric
from .filtration import FilteredComplex, SnapshotPair, snapshot_pair
from .geometry import LabeledPointCloud, euclidean_matrix
from .sheaf import SheafWeighting, coboundary_matrix

# Singular values below this fraction of the largest count as zero when
# extracting the persistence-subspace basis.
SVD_CUTOFF_RTOL = 1e-10

DEFAULT_TOL_REL = 1e-8
DEFAULT_TOL_ABS = 1e-12

STAT_NAMES = ("max", "min", "mean", "median", "sum", "std", "var", "count")

# Test-only fault hook: when set, the first entry of every assembled
# coboundary has its sign flipped, so verification must catch it.
FAULT_ENV = "PSLAP_FLIP_COBOUNDARY_SIGN"


@dataclass
class PslOperator:
    """Assembled persistent sheaf Laplacian at one snapshot pair."""

    q: int
    matrix: np.ndarray
    up_part: np.ndarray
    down_part: np.ndarray
    pair: SnapshotPair

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass
class SpectrumSummary:
    """Harmonic multiplicity plus statistics of the nonharmonic spectrum."""

    betti: int
    nonzero_eigs: np.ndarray
    lambda_min_nonzero: Optional[float]
    stats: tuple[float, ...]
    zero_tolerance_used: float
    empty: bool = False

    @property
    def count_nonzero(self) -> int:
        return len(self.nonzero_eigs)

    def stats_dict(self) -> dict:
        return dict(zip(STAT_NAMES, self.stats))


def _maybe_fault(mat):
    if os.environ.get(FAULT_ENV, "") in ("1", "true", "yes") and mat.nnz:
        mat = mat.copy()
        mat.data[0] = -mat.data[0]
    return mat


def _coboundary(fc, counts, q, w, euclid):
    return _maybe_fault(coboundary_matrix(fc, counts, q, w, euclid).matrix)


def persistent_subspace_basis(d_l: np.ndarray, constrained_rows: Sequence[int]) -> np.ndarray:
    """Orthonormal basis of {c : (D_L^T c) vanishes on the given q-simplex
    rows}, as columns in the (q+1)-simplex coordinates of L.

    `d_l` is the dense coboundary (rows = (q+1)-simplices of L, columns =
    q-simplices of L). No constrained rows means the full space (identity).
    """
    n_rows = d_l.shape[0]
    constrained = np.asarray(list(constrained_rows), dtype=np.intp)
    if len(constrained) == 0 or n_rows == 0:
        return np.eye(n_rows)
    block = d_l[:, constrained].T  # rows of D_L^T for the constrained simplices
    _, s, vt = np.linalg.svd(block, full_matrices=True)
    if len(s) == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > SVD_CUTOFF_RTOL * s[0]))
    return vt[rank:].T


def assemble_psl(
    q: int,
    pair: SnapshotPair,
    cloud: LabeledPointCloud,
    w: SheafWeighting,
    euclid: Optional[np.ndarray] = None,
) -> PslOperator:
    """Assemble the degree-q persistent sheaf Laplacian for K <= L."""
    if q not in (0, 1):
        raise ValueError("q must be 0 or 1")
    fc = pair.complex
    if len(w.charges) != fc.n_points or len(cloud) != fc.n_points:
        raise DimensionMismatch("cloud/charges size disagrees with the complex")
    if euclid is None:
        euclid = euclidean_matrix(cloud)

    kq = pair.k_count(q)
    lq = pair.l_count(q)
    lq1 = pair.l_count(q + 1)
    if kq == 0:
        zero = np.zeros((0, 0))
        return PslOperator(q, zero, zero.copy(), zero.copy(), pair)

    d_l = _coboundary(fc, pair.l_counts, q, w, euclid)  # (lq1, lq) sparse

    if lq == kq:
        # No constrained simplices: subspace is everything, skip the SVD.
        m = d_l[:, :kq].toarray().T if lq1 else np.zeros((kq, 0))
    else:
        dense = d_l.toarray()
        z = persistent_subspace_basis(dense, range(kq, lq))
        m = dense[:, :kq].T @ z if lq1 else np.zeros((kq, 0))
    up = m @ m.T
    up = 0.5 * (up + up.T)

    if q == 0:
        down = np.zeros((kq, kq))
    else:
        d_km1 = _coboundary(fc, pair.k_counts, q - 1, w, euclid)  # (kq, k_{q-1})
        down = (d_km1 @ d_km1.T).toarray()
        down = 0.5 * (down + down.T)

    return PslOperator(q, up + down, up, down, pair)


def spectrum(
    op: PslOperator,
    tol_rel: float = DEFAULT_TOL_REL,
    tol_abs: float = DEFAULT_TOL_ABS,
) -> SpectrumSummary:
    """Full symmetric eigendecomposition summarised as harmonic multiplicity
    (eigenvalues <= tol_abs + tol_rel*max(lambda_max, 1)) plus the fixed
    8-statistic block over the remaining spectrum."""
    a = op.matrix
    n = a.shape[0]
    if n == 0:
        return SpectrumSummary(
            betti=0,
            nonzero_eigs=np.empty(0),
            lambda_min_nonzero=None,
            stats=(0.0,) * 8,
            zero_tolerance_used=tol_abs + tol_rel,
            empty=True,
        )
    asym = float(np.max(np.abs(a - a.T)))
    if asym > 1e-9:
        raise NonSymmetric(f"matrix asymmetry {asym:.3e} exceeds 1e-9")
    eigs = np.linalg.eigvalsh(a)
    lam_max = float(eigs[-1])
    tol = tol_abs + tol_rel * max(lam_max, 1.0)
    nonzero = eigs[eigs > tol]
    betti = n - len(nonzero)
    if len(nonzero):
        stats = (
            float(nonzero.max()),
            float(nonzero.min()),
            float(nonzero.mean()),
            float(np.median(nonzero)),
            float(nonzero.sum()),
            float(nonzero.std()),
            float(nonzero.var()),
            float(len(nonzero)),
        )
        lam_min = float(nonzero[0])
    else:
        stats = (0.0,) * 8
        lam_min = None
    return SpectrumSummary(
        betti=betti,
        nonzero_eigs=nonzero,
        lambda_min_nonzero=lam_min,
        stats=stats,
        zero_tolerance_used=tol,
    )


def psl_over_filtration(
    fc: FilteredComplex,
    cloud: LabeledPointCloud,
    w: SheafWeighting,
    grid: Sequence[float],
    delta: float = 0.0,
    q: int = 0,
    tol_rel: float = DEFAULT_TOL_REL,
    tol_abs: float = DEFAULT_TOL_ABS,
) -> list[tuple[float, SpectrumSummary]]:
    """Spectrum of the degree-q PSL at every grid threshold t (pairing each
    K at t with L at t + delta)."""
    grid = [float(t) for t in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly ascending")
    euclid = euclidean_matrix(cloud)
    out = []
    for t in grid:
        pair = snapshot_pair(fc, t, delta)
        summ = spectrum(assemble_psl(q, pair, cloud, w, euclid), tol_rel, tol_abs)
        out.append((t, summ))
    return out


def sweep_to_dict(
    sweep: list[tuple[float, SpectrumSummary]],
    q: int,
    delta: float,
) -> dict:
    """JSON-ready view of a sweep; field names are part of the contract."""
    return {
        "q": q,
        "delta": delta,
        "grid": [t for t, _ in sweep],
        "records": [
            {
                "t": t,
                "betti": s.betti,
                "lambda_min": s.lambda_min_nonzero,
                "stats": s.stats_dict(),
                "empty": s.empty,
            }
            for t, s in sweep
        ],
    }


def sweep_to_json(sweep, q: int, delta: float) -> str:
    return json.dumps(sweep_to_dict(sweep, q, delta), indent=2)


def resolve_threads(threads: Optional[int] = None) -> int:
    """Thread count: explicit argument, else PSLAP_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get("PSLAP_THREADS", "1"))
    return max(1, threads)


def parallel_map(fn: Callable, items: Iterable, threads: Optional[int] = None) -> list:
    """Deterministic map: results are ordered by task index regardless of
    completion order; threads=1 degenerates to a plain loop."""
    items = list(items)
    threads = resolve_threads(threads)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
