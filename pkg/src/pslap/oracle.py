"""Brute-force reference implementations used to validate the engine.

Deliberately duplicated math on a structurally different code path: dense
coboundaries assembled by nested loops, the persistence subspace always
taken through a full SVD, and a union-find component counter for the
trivial-sheaf degree-0 case. Shares only the complex types with the
engine, never its assembly or kernel routines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .engine import assemble_psl, spectrum
from .errors import InstanceTooLarge
from .filtration import FilteredComplex, SnapshotPair, build_alpha, build_vr, snapshot_pair
from .geometry import (
    BIPARTITE_MODIFIED,
    DistanceSpec,
    LabeledPointCloud,
    pairwise_distances,
)
from .sheaf import CONSTANT_ONE, SheafWeighting

ORACLE_MAX_SIMPLICES = 500


def _simplex_lists(fc: FilteredComplex, counts: Sequence[int]) -> list[list[tuple[int, ...]]]:
    verts = [(int(i),) for i in range(counts[0])]
    edges = [tuple(int(x) for x in e) for e in fc.edges[: counts[1]]]
    tris = [tuple(int(x) for x in t) for t in fc.tris[: counts[2]]]
    return [verts, edges, tris]


def _own_sign(face: tuple[int, ...], coface: tuple[int, ...]) -> int:
    missing = [v for v in coface if v not in face]
    assert len(missing) == 1
    return (-1) ** coface.index(missing[0])


def _own_weight(simplex: tuple[int, ...], coords: np.ndarray, f_kind: str) -> float:
    if f_kind == CONSTANT_ONE:
        return 1.0
    w = 1.0
    for a in range(len(simplex)):
        for b in range(a + 1, len(simplex)):
            w *= math.dist(coords[simplex[a]], coords[simplex[b]])
    return w


def _own_scalar(
    face: tuple[int, ...],
    coface: tuple[int, ...],
    coords: np.ndarray,
    charges: np.ndarray,
    f_kind: str,
) -> float:
    num = _own_weight(face, coords, f_kind)
    for v in coface:
        if v not in face:
            num *= charges[v]
    return num / _own_weight(coface, coords, f_kind)


def _dense_coboundary(
    rows: list[tuple[int, ...]],
    cols: list[tuple[int, ...]],
    coords: np.ndarray,
    charges: np.ndarray,
    f_kind: str,
) -> np.ndarray:
    d = np.zeros((len(rows), len(cols)))
    col_index = {s: i for i, s in enumerate(cols)}
    for r, coface in enumerate(rows):
        for drop in range(len(coface)):
            face = coface[:drop] + coface[drop + 1 :]
            c = col_index.get(face)
            if c is None:
                continue
            d[r, c] = _own_sign(face, coface) * _own_scalar(face, coface, coords, charges, f_kind)
    return d


def dense_psl(
    q: int,
    pair: SnapshotPair,
    cloud: LabeledPointCloud,
    w: SheafWeighting,
) -> np.ndarray:
    """Dense persistent sheaf Laplacian, no sparsity, no fast paths.

    Always routes the up-part through a full SVD of the constrained
    adjoint block, even when K == L. Returns the dense matrix.
    """
    fc = pair.complex
    total = fc.n_points + len(fc.edge_vals) + len(fc.tri_vals)
    if total > ORACLE_MAX_SIMPLICES:
        raise InstanceTooLarge(f"{total} simplices exceeds the oracle limit {ORACLE_MAX_SIMPLICES}")

    coords = cloud.coords
    l_simps = _simplex_lists(fc, pair.l_counts)
    k_simps = _simplex_lists(fc, pair.k_counts)
    kq = len(k_simps[q])
    lq = len(l_simps[q])
    if kq == 0:
        return np.zeros((0, 0))

    d_l = _dense_coboundary(l_simps[q + 1] if q + 1 <= 2 else [], l_simps[q], coords, w.charges, w.f_kind)
    adjoint = d_l.T  # (lq, n_{q+1}(L))
    constrained = adjoint[kq:lq]
    if constrained.shape[0] and adjoint.shape[1]:
        _, s, vt = np.linalg.svd(constrained, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * s[0])) if len(s) and s[0] > 0 else 0
        basis = vt[rank:].T
    else:
        basis = np.eye(adjoint.shape[1])
    m = adjoint[:kq] @ basis
    delta = m @ m.T

    if q >= 1:
        d_down = _dense_coboundary(k_simps[q], k_simps[q - 1], coords, w.charges, w.f_kind)
        delta = delta + d_down @ d_down.T
    return delta


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def persistent_betti0_unionfind(dist: np.ndarray, t: float, t_plus_delta: float) -> int:
    """Persistent beta_0 for the threshold pair (t, t+delta) on a graph
    whose edges are the finite entries of `dist`.

    Every vertex is born at 0, so the image of H0(K) -> H0(L) has one
    class per component of L: count components at threshold t_plus_delta.
    """
    n = dist.shape[0]
    uf = _UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= t_plus_delta:
                uf.union(i, j)
    return len({uf.find(i) for i in range(n)})


@dataclass
class OracleReport:
    """Engine-vs-oracle comparison for one instance configuration."""

    instance: dict
    engine_values: dict
    oracle_values: dict
    max_abs_err: float
    max_rel_err: float
    passed: bool
    detail: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "instance": self.instance,
                "engine": self.engine_values,
                "oracle": self.oracle_values,
                "max_abs_err": self.max_abs_err,
                "max_rel_err": self.max_rel_err,
                "pass": self.passed,
                "detail": self.detail,
            }
        )


@dataclass
class VerificationOutcome:
    reports: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.reports)


def _edge_value_matrix(fc: FilteredComplex) -> np.ndarray:
    """Pseudo-distance matrix carrying each complex edge's filtration value
    (inf where no edge), so union-find sees the same 1-skeleton."""
    m = np.full((fc.n_points, fc.n_points), np.inf)
    np.fill_diagonal(m, 0.0)
    for (a, b), val in zip(fc.edges, fc.edge_vals):
        m[a, b] = m[b, a] = val
    return m


def _random_instance(rng: np.random.Generator, trial: int):
    n = int(rng.integers(4, 13))
    while True:
        coords = rng.uniform(0.0, 8.0, size=(n, 3))
        d = np.linalg.norm(coords[:, None] - coords[None, :], axis=-1)
        if np.min(d[~np.eye(n, dtype=bool)]) > 1e-3:
            break
    charges = rng.uniform(-1.0, 1.0, size=n)
    charges[np.abs(charges) < 1e-3] = 0.5  # keep generic
    if trial % 5 == 4:
        charges[int(rng.integers(0, n))] = 0.0  # exercise zero-charge stalk maps
    cloud = LabeledPointCloud.from_arrays(coords, charges)

    kind = ("vr", "bipartite", "alpha")[trial % 3]
    if kind == "vr":
        fc = build_vr(pairwise_distances(cloud, DistanceSpec.euclidean()), max_dim=2, max_scale=9.0 + 1.5)
    elif kind == "bipartite":
        half = rng.permutation(n)
        set_a = set(int(x) for x in half[: max(1, n // 2)])
        set_b = set(range(n)) - set_a
        spec = DistanceSpec.bipartite(set_a, set_b)
        fc = build_vr(pairwise_distances(cloud, spec), max_dim=2, max_scale=9.0 + 1.5)
    else:
        fc = build_alpha(cloud)
    return cloud, fc, kind


def run_verification(trials: int, seed: int = 0, grid: Optional[Sequence[float]] = None) -> VerificationOutcome:
    """Randomized engine-vs-oracle battery.

    Per instance: dense-oracle eigenvalue comparison for q in {0, 1} and
    delta in {0, 0.5, 1.0} over the grid, plus the trivial-sheaf beta_0
    versus union-find. Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    grid = list(grid) if grid is not None else [3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]
    outcome = VerificationOutcome()
    deltas = (0.0, 0.5, 1.0)

    for trial in range(trials):
        cloud, fc, kind = _random_instance(rng, trial)
        charges = cloud.charges
        w = SheafWeighting(charges=charges)
        instance_base = {"trial": trial, "kind": kind, "n_points": len(cloud), "seed": seed}

        for q in (0, 1):
            delta = deltas[trial % len(deltas)]
            eng_eigs, orc_eigs, betti_eng = [], [], []
            max_abs = max_rel = 0.0
            ok = True
            for t in grid:
                pair = snapshot_pair(fc, t, delta)
                op = assemble_psl(q, pair, cloud, w)
                dense = dense_psl(q, pair, cloud, w)
                ev_e = np.linalg.eigvalsh(op.matrix) if op.size else np.empty(0)
                ev_o = np.linalg.eigvalsh(dense) if dense.shape[0] else np.empty(0)
                if ev_e.shape != ev_o.shape:
                    ok = False
                    break
                if len(ev_e):
                    abs_err = np.abs(ev_e - ev_o)
                    rel_err = abs_err / np.maximum(1.0, np.abs(ev_o))
                    max_abs = max(max_abs, float(abs_err.max()))
                    max_rel = max(max_rel, float(rel_err.max()))
                eng_eigs.append(len(ev_e))
                orc_eigs.append(len(ev_o))
                betti_eng.append(spectrum(op).betti)
            ok = ok and max_rel <= 1e-8
            outcome.reports.append(
                OracleReport(
                    instance={**instance_base, "check": "dense_psl", "q": q, "delta": delta},
                    engine_values={"betti": betti_eng, "sizes": eng_eigs},
                    oracle_values={"sizes": orc_eigs},
                    max_abs_err=max_abs,
                    max_rel_err=max_rel,
                    passed=ok,
                    detail="" if ok else "eigenvalue multisets disagree",
                )
            )

        # Trivial sheaf: degree-0 harmonic count must equal graph components.
        trivial = SheafWeighting.trivial(len(cloud))
        edge_mat = _edge_value_matrix(fc)
        for delta in deltas:
            betti_eng, betti_uf = [], []
            for t in grid:
                pair = snapshot_pair(fc, t, delta)
                betti_eng.append(spectrum(assemble_psl(0, pair, cloud, trivial)).betti)
                betti_uf.append(persistent_betti0_unionfind(edge_mat, t, t + delta))
            ok = betti_eng == betti_uf
            outcome.reports.append(
                OracleReport(
                    instance={**instance_base, "check": "unionfind_beta0", "q": 0, "delta": delta},
                    engine_values={"betti": betti_eng},
                    oracle_values={"betti": betti_uf},
                    max_abs_err=float(max(abs(a - b) for a, b in zip(betti_eng, betti_uf)) if betti_eng else 0.0),
                    max_rel_err=0.0,
                    passed=ok,
                    detail="" if ok else "harmonic count disagrees with union-find",
                )
            )
    return outcome
