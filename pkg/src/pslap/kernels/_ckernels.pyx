# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: VR simplex enumeration and coboundary entry values.

Must stay bit-compatible with `pykernels` (same enumeration order, same
IEEE operation order); the backend-equivalence test enforces this.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def vr_edges(double[:, :] dist, double max_scale):
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t i, j, count = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            if dist[i, j] <= max_scale and dist[i, j] != INFINITY:
                count += 1
    u_arr = np.empty(count, dtype=np.int64)
    v_arr = np.empty(count, dtype=np.int64)
    val_arr = np.empty(count, dtype=np.float64)
    cdef long long[:] u = u_arr
    cdef long long[:] v = v_arr
    cdef double[:] val = val_arr
    cdef Py_ssize_t pos = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            if dist[i, j] <= max_scale and dist[i, j] != INFINITY:
                u[pos] = i
                v[pos] = j
                val[pos] = dist[i, j]
                pos += 1
    return u_arr, v_arr, val_arr


def vr_triangles(double[:, :] dist, double max_scale):
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t i, j, k, count = 0
    cdef double d_ij, d_ik, d_jk, diam
    for i in range(n - 2):
        for j in range(i + 1, n - 1):
            d_ij = dist[i, j]
            if not d_ij <= max_scale or d_ij == INFINITY:
                continue
            for k in range(j + 1, n):
                d_ik = dist[i, k]
                d_jk = dist[j, k]
                diam = d_ik if d_ik > d_jk else d_jk
                if d_ij > diam:
                    diam = d_ij
                if diam <= max_scale and diam != INFINITY:
                    count += 1
    i_out = np.empty(count, dtype=np.int64)
    j_out = np.empty(count, dtype=np.int64)
    k_out = np.empty(count, dtype=np.int64)
    v_out = np.empty(count, dtype=np.float64)
    cdef long long[:] iv = i_out
    cdef long long[:] jv = j_out
    cdef long long[:] kv = k_out
    cdef double[:] vv = v_out
    cdef Py_ssize_t pos = 0
    for i in range(n - 2):
        for j in range(i + 1, n - 1):
            d_ij = dist[i, j]
            if not d_ij <= max_scale or d_ij == INFINITY:
                continue
            for k in range(j + 1, n):
                d_ik = dist[i, k]
                d_jk = dist[j, k]
                diam = d_ik if d_ik > d_jk else d_jk
                if d_ij > diam:
                    diam = d_ij
                if diam <= max_scale and diam != INFINITY:
                    iv[pos] = i
                    jv[pos] = j
                    kv[pos] = k
                    vv[pos] = diam
                    pos += 1
    return i_out, j_out, k_out, v_out


def d0_values(long long[:] u, long long[:] v, double[:] charges,
              double[:, :] euclid, bint weighted):
    cdef Py_ssize_t m = u.shape[0]
    a_arr = np.empty(m, dtype=np.float64)
    b_arr = np.empty(m, dtype=np.float64)
    cdef double[:] a = a_arr
    cdef double[:] b = b_arr
    cdef Py_ssize_t e
    cdef double r
    for e in range(m):
        if weighted:
            r = euclid[u[e], v[e]]
            a[e] = -charges[v[e]] / r
            b[e] = charges[u[e]] / r
        else:
            a[e] = -charges[v[e]]
            b[e] = charges[u[e]]
    return a_arr, b_arr


def d1_values(long long[:] i, long long[:] j, long long[:] k, double[:] charges,
              double[:, :] euclid, bint weighted):
    cdef Py_ssize_t m = i.shape[0]
    jk_arr = np.empty(m, dtype=np.float64)
    ik_arr = np.empty(m, dtype=np.float64)
    ij_arr = np.empty(m, dtype=np.float64)
    cdef double[:] a = jk_arr
    cdef double[:] b = ik_arr
    cdef double[:] c = ij_arr
    cdef Py_ssize_t t
    cdef double r_ij, r_ik, r_jk
    for t in range(m):
        if weighted:
            r_ij = euclid[i[t], j[t]]
            r_ik = euclid[i[t], k[t]]
            r_jk = euclid[j[t], k[t]]
            a[t] = charges[i[t]] / (r_ij * r_ik)
            b[t] = -charges[j[t]] / (r_ij * r_jk)
            c[t] = charges[k[t]] / (r_ik * r_jk)
        else:
            a[t] = charges[i[t]]
            b[t] = -charges[j[t]]
            c[t] = charges[k[t]]
    return jk_arr, ik_arr, ij_arr
