# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same contract as _pykernels."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def assign_points(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                  double[::1] data, double[::1] row_sq,
                  double[:, ::1] centroids, double[::1] centroid_sq):
    cdef Py_ssize_t m = indptr.shape[0] - 1
    cdef Py_ssize_t k = centroids.shape[0]
    labels_arr = np.empty(m, dtype=np.int64)
    dists_arr = np.empty(m, dtype=np.float64)
    cdef cnp.int64_t[::1] labels = labels_arr
    cdef double[::1] dists = dists_arr
    cdef Py_ssize_t i, c, p, lo, hi
    cdef double dot, d2, best
    cdef Py_ssize_t best_c
    for i in range(m):
        lo = indptr[i]
        hi = indptr[i + 1]
        best = 0.0
        best_c = 0
        for c in range(k):
            dot = 0.0
            for p in range(lo, hi):
                dot += data[p] * centroids[c, indices[p]]
            d2 = row_sq[i] + centroid_sq[c] - 2.0 * dot
            if c == 0 or d2 < best:
                best = d2
                best_c = c
        labels[i] = best_c
        dists[i] = best if best > 0.0 else 0.0
    return labels_arr, dists_arr


def centroid_sums(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                  double[::1] data, cnp.int64_t[::1] labels,
                  Py_ssize_t k, Py_ssize_t n):
    sums_arr = np.zeros((k, n), dtype=np.float64)
    counts_arr = np.zeros(k, dtype=np.int64)
    cdef double[:, ::1] sums = sums_arr
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef Py_ssize_t m = indptr.shape[0] - 1
    cdef Py_ssize_t i, p
    cdef cnp.int64_t c
    for i in range(m):
        c = labels[i]
        counts[c] += 1
        for p in range(indptr[i], indptr[i + 1]):
            sums[c, indices[p]] += data[p]
    return sums_arr, counts_arr


def weighted_column_sums(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                         double[::1] data, double[:, ::1] weights, Py_ssize_t n):
    cdef Py_ssize_t m = indptr.shape[0] - 1
    cdef Py_ssize_t k = weights.shape[1]
    sums_arr = np.zeros((k, n), dtype=np.float64)
    cdef double[:, ::1] sums = sums_arr
    cdef Py_ssize_t i, p, c
    for c in range(k):
        for i in range(m):
            for p in range(indptr[i], indptr[i + 1]):
                sums[c, indices[p]] += data[p] * weights[i, c]
    return sums_arr


def gmm_log_densities(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                      double[::1] data, double[:, ::1] means,
                      double[:, ::1] inv_var, double[::1] comp_const):
    cdef Py_ssize_t m = indptr.shape[0] - 1
    cdef Py_ssize_t k = means.shape[0]
    out_arr = np.empty((m, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, c, p
    cdef cnp.int64_t col
    cdef double s, x
    for c in range(k):
        for i in range(m):
            s = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                col = indices[p]
                x = data[p]
                s += x * x * inv_var[c, col] - 2.0 * x * means[c, col] * inv_var[c, col]
            out[i, c] = -0.5 * (comp_const[c] + s)
    return out_arr


def row_dots(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
             double[::1] data, cnp.int64_t[::1] row_ids, double[::1] v):
    cdef Py_ssize_t nr = row_ids.shape[0]
    out_arr = np.empty(nr, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, p
    cdef cnp.int64_t r
    cdef double dot
    for i in range(nr):
        r = row_ids[i]
        dot = 0.0
        for p in range(indptr[r], indptr[r + 1]):
            dot += data[p] * v[indices[p]]
        out[i] = dot
    return out_arr


def minibatch_update(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                     double[::1] data, cnp.int64_t[::1] batch_rows,
                     cnp.int64_t[::1] labels, double[:, ::1] centroids,
                     cnp.int64_t[::1] counts):
    cdef Py_ssize_t nb = batch_rows.shape[0]
    cdef Py_ssize_t n = centroids.shape[1]
    cdef Py_ssize_t t, d, p
    cdef cnp.int64_t r, c
    cdef double eta, keep
    for t in range(nb):
        r = batch_rows[t]
        c = labels[t]
        counts[c] += 1
        eta = 1.0 / counts[c]
        keep = 1.0 - eta
        for d in range(n):
            centroids[c, d] *= keep
        for p in range(indptr[r], indptr[r + 1]):
            centroids[c, indices[p]] += eta * data[p]


def glove_epoch(cnp.int64_t[::1] i_idx, cnp.int64_t[::1] j_idx,
                double[::1] logx, double[::1] fw, cnp.int64_t[::1] order,
                double[:, ::1] w_main, double[:, ::1] w_ctx,
                double[::1] b_main, double[::1] b_ctx,
                double[:, ::1] g_main, double[:, ::1] g_ctx,
                double[::1] gb_main, double[::1] gb_ctx, double rate):
    cdef Py_ssize_t nt = order.shape[0]
    cdef Py_ssize_t dim = w_main.shape[1]
    cdef Py_ssize_t t, d
    cdef cnp.int64_t o, i, j
    cdef double diff, fdiff, loss, gi, gj, wi_d
    loss = 0.0
    for t in range(nt):
        o = order[t]
        i = i_idx[o]
        j = j_idx[o]
        diff = b_main[i] + b_ctx[j] - logx[o]
        for d in range(dim):
            diff += w_main[i, d] * w_ctx[j, d]
        fdiff = fw[o] * diff
        loss += fdiff * diff
        for d in range(dim):
            wi_d = w_main[i, d]
            gi = fdiff * w_ctx[j, d]
            gj = fdiff * wi_d
            w_main[i, d] = wi_d - rate * gi / sqrt(g_main[i, d])
            w_ctx[j, d] = w_ctx[j, d] - rate * gj / sqrt(g_ctx[j, d])
            g_main[i, d] += gi * gi
            g_ctx[j, d] += gj * gj
        b_main[i] -= rate * fdiff / sqrt(gb_main[i])
        b_ctx[j] -= rate * fdiff / sqrt(gb_ctx[j])
        gb_main[i] += fdiff * fdiff
        gb_ctx[j] += fdiff * fdiff
    return loss
