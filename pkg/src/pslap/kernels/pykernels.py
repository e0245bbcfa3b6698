"""Pure-Python (numpy) implementations of the hot kernels.

Fallback for the compiled extension in `_ckernels`. Both backends must
produce identical arrays (same enumeration order, same IEEE arithmetic)
so the rest of the package never cares which one is active.
"""

from __future__ import annotations

import numpy as np


def vr_edges(dist: np.ndarray, max_scale: float):
    """Edges (i < j) with finite dist[i, j] <= max_scale.

    Returns (u, v, val) int64/int64/float64 arrays in lexicographic (i, j)
    enumeration order; val is the pair distance (the edge's entry scale
    under the diameter convention).
    """
    n = dist.shape[0]
    u, v = np.triu_indices(n, k=1)
    vals = dist[u, v]
    keep = (vals <= max_scale) & (vals < np.inf)
    return u[keep].astype(np.int64), v[keep].astype(np.int64), vals[keep]


def vr_triangles(dist: np.ndarray, max_scale: float):
    """Triangles (i < j < k) whose three pairwise distances are all finite
    and whose diameter (max pair distance) is <= max_scale.

    Returns (i, j, k, val) arrays in lexicographic enumeration order;
    val is the diameter.
    """
    n = dist.shape[0]
    out_i, out_j, out_k, out_v = [], [], [], []
    for i in range(n - 2):
        row_i = dist[i]
        for j in range(i + 1, n - 1):
            d_ij = row_i[j]
            if not d_ij <= max_scale or d_ij == np.inf:
                continue
            ks = np.arange(j + 1, n)
            diam = np.maximum(d_ij, np.maximum(row_i[j + 1 :], dist[j, j + 1 :]))
            keep = (diam <= max_scale) & (diam < np.inf)
            if keep.any():
                kk = ks[keep]
                out_i.append(np.full(kk.shape, i, dtype=np.int64))
                out_j.append(np.full(kk.shape, j, dtype=np.int64))
                out_k.append(kk.astype(np.int64))
                out_v.append(diam[keep])
    if not out_i:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy(), np.empty(0)
    return (
        np.concatenate(out_i),
        np.concatenate(out_j),
        np.concatenate(out_k),
        np.concatenate(out_v),
    )


def d0_values(u, v, charges, euclid, weighted):
    """Per-edge coboundary entries for dim 0 -> 1.

    For edge (u, v) with u < v the entry at column u is -q_v * w and at
    column v is +q_u * w, where w = 1/r_uv when `weighted` (the
    product-of-distances simplex weight) and 1 otherwise.
    """
    if weighted:
        r = euclid[u, v]
        return -charges[v] / r, charges[u] / r
    return -charges[v].copy(), charges[u].copy()


def d1_values(i, j, k, charges, euclid, weighted):
    """Per-triangle coboundary entries for dim 1 -> 2.

    For triangle (i, j, k) with i < j < k the entries, in column order
    edge(j,k), edge(i,k), edge(i,j), are
        +q_i * w_i,  -q_j * w_j,  +q_k * w_k
    with w_i = 1/(r_ij*r_ik) etc. when `weighted` and 1 otherwise.
    """
    if weighted:
        r_ij = euclid[i, j]
        r_ik = euclid[i, k]
        r_jk = euclid[j, k]
        return (
            charges[i] / (r_ij * r_ik),
            -charges[j] / (r_ij * r_jk),
            charges[k] / (r_ik * r_jk),
        )
    return charges[i].copy(), -charges[j].copy(), charges[k].copy()
