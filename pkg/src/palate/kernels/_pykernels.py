"""Pure numpy implementations of the hot kernels.

Reference semantics for the compiled backend: same inputs, same update
order. Per-row accumulations use bincount/add.at, which add contributions
in storage order exactly like the compiled loops.
"""

import numpy as np


def _row_of(indptr: np.ndarray) -> np.ndarray:
    m = len(indptr) - 1
    return np.repeat(np.arange(m, dtype=np.int64), np.diff(indptr))


def assign_points(indptr, indices, data, row_sq, centroids, centroid_sq):
    """Nearest centroid per row under squared Euclidean distance.

    Returns (labels, sqdists). Ties go to the lowest centroid id;
    distances are clamped at zero against rounding.
    """
    m = len(indptr) - 1
    k = centroids.shape[0]
    row_of = _row_of(indptr)
    dots = np.empty((m, k))
    for c in range(k):
        dots[:, c] = np.bincount(row_of, weights=data * centroids[c, indices], minlength=m)
    d2 = row_sq[:, None] + centroid_sq[None, :] - 2.0 * dots
    labels = np.argmin(d2, axis=1).astype(np.int64)
    dists = np.maximum(d2[np.arange(m), labels], 0.0)
    return labels, dists


def centroid_sums(indptr, indices, data, labels, k, n):
    """Per-cluster column sums and member counts for a labeling."""
    sums = np.zeros((k, n))
    np.add.at(sums, (labels[_row_of(indptr)], indices), data)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


def weighted_column_sums(indptr, indices, data, weights, n):
    """sums[c, d] = sum over stored entries of value * weights[row, c]."""
    k = weights.shape[1]
    row_of = _row_of(indptr)
    sums = np.empty((k, n))
    for c in range(k):
        sums[c] = np.bincount(indices, weights=data * weights[row_of, c], minlength=n)
    return sums


def gmm_log_densities(indptr, indices, data, means, inv_var, comp_const):
    """Diagonal-Gaussian log density of each row under each component.

    comp_const[c] = sum_d log(2*pi*var[c,d]) + mean[c,d]^2 * inv_var[c,d],
    precomputed by the caller; the sparse correction only walks stored
    entries: (x^2 - 2*x*mean) * inv_var.
    """
    m = len(indptr) - 1
    k = means.shape[0]
    row_of = _row_of(indptr)
    out = np.empty((m, k))
    d_sq = data * data
    for c in range(k):
        t = d_sq * inv_var[c, indices] - 2.0 * data * (means[c] * inv_var[c])[indices]
        out[:, c] = -0.5 * (comp_const[c] + np.bincount(row_of, weights=t, minlength=m))
    return out


def row_dots(indptr, indices, data, row_ids, v):
    """Dot product of each selected sparse row with dense vector ``v``."""
    out = np.empty(len(row_ids))
    for i, r in enumerate(row_ids):
        lo, hi = indptr[r], indptr[r + 1]
        out[i] = np.dot(data[lo:hi], v[indices[lo:hi]])
    return out


def minibatch_update(indptr, indices, data, batch_rows, labels, centroids, counts):
    """Sequential per-center running-mean updates for one mini-batch.

    counts holds the number of points ever assigned to each center and is
    updated in place along with centroids.
    """
    for t, r in enumerate(batch_rows):
        c = labels[t]
        counts[c] += 1
        eta = 1.0 / counts[c]
        centroids[c] *= 1.0 - eta
        lo, hi = indptr[r], indptr[r + 1]
        centroids[c, indices[lo:hi]] += eta * data[lo:hi]


def glove_epoch(i_idx, j_idx, logx, fw, order, w_main, w_ctx, b_main, b_ctx,
                g_main, g_ctx, gb_main, gb_ctx, rate):
    """One adagrad epoch over co-occurrence triples in ``order``.

    Updates parameters in place and returns the epoch loss
    sum f(x) * (w_i . w~_j + b_i + b~_j - log x)^2. Gradients for both
    sides of a pair are computed from pre-update values.
    """
    loss = 0.0
    for t in order:
        i = i_idx[t]
        j = j_idx[t]
        wi = w_main[i]
        wj = w_ctx[j]
        diff = np.dot(wi, wj) + b_main[i] + b_ctx[j] - logx[t]
        fdiff = fw[t] * diff
        loss += fdiff * diff
        grad_i = fdiff * wj
        grad_j = fdiff * wi
        w_main[i] = wi - rate * grad_i / np.sqrt(g_main[i])
        w_ctx[j] = wj - rate * grad_j / np.sqrt(g_ctx[j])
        g_main[i] += grad_i * grad_i
        g_ctx[j] += grad_j * grad_j
        b_main[i] -= rate * fdiff / np.sqrt(gb_main[i])
        b_ctx[j] -= rate * fdiff / np.sqrt(gb_ctx[j])
        gb_main[i] += fdiff * fdiff
        gb_ctx[j] += fdiff * fdiff
    return loss
