"""Flavor-palate clustering: Lloyd k-means, mini-batch k-means, diagonal
Gaussian mixture EM, elbow scans, and centroid introspection.

All fits take an optional ``rows`` argument naming the rows to fit on
(the pipeline passes the nonempty rows); assignments in the returned
model always cover every row of the matrix. Randomness comes from
explicit integer seeds; identical seeds give identical models.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels
from .featurize import VocabIndex
from .matrix import FeatureMatrix
from .seeding import make_rng, subseed

VARIANCE_FLOOR = 1e-6
DEFAULT_ELBOW_KS = (2, 4, 8, 16, 32, 64)


@dataclass
class KMeansModel:
    k: int
    centroids: np.ndarray      # k x n
    assignments: np.ndarray    # per-row nearest centroid, all rows
    sse: float                 # within-cluster squared distance over fit rows
    iterations_run: int
    seed: int
    sse_history: list[float] = field(default_factory=list)
    fit_rows: np.ndarray = None


@dataclass
class GmmModel:
    k: int
    means: np.ndarray
    variances: np.ndarray      # diagonal covariances, elements >= VARIANCE_FLOOR
    weights: np.ndarray        # mixing proportions, sum to 1
    log_likelihood: float
    seed: int
    ll_history: list[float] = field(default_factory=list)
    iterations_run: int = 0


@dataclass
class ElbowCurve:
    points: list[tuple[int, float]]
    chosen_k: Optional[int]


def _centroid_sq(centroids: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", centroids, centroids)


def _assign(X: FeatureMatrix, centroids: np.ndarray):
    return kernels.assign_points(X.indptr, X.indices, X.data, X.row_sq_norms,
                                 np.ascontiguousarray(centroids), _centroid_sq(centroids))


def _sq_dists_to(X: FeatureMatrix, center: np.ndarray) -> np.ndarray:
    _, dists = _assign(X, center[None, :])
    return dists


def _kmeanspp(Xs: FeatureMatrix, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seed centers by D^2 sampling."""
    n_s = Xs.n_rows
    centers = np.zeros((k, Xs.n_cols))
    centers[0] = Xs.row_dense(int(rng.integers(n_s)))
    d2 = _sq_dists_to(Xs, centers[0])
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n_s, p=d2 / total))
        else:
            idx = int(rng.integers(n_s))
        centers[j] = Xs.row_dense(idx)
        d2 = np.minimum(d2, _sq_dists_to(Xs, centers[j]))
    return centers


def _update_centroids(Xs: FeatureMatrix, labels: np.ndarray, dists: np.ndarray,
                      centroids: np.ndarray, k: int) -> np.ndarray:
    sums, counts = kernels.centroid_sums(Xs.indptr, Xs.indices, Xs.data,
                                         labels, k, Xs.n_cols)
    new = np.array(sums)
    nonempty = counts > 0
    new[nonempty] /= counts[nonempty, None]
    empty = np.flatnonzero(~nonempty)
    if len(empty):
        # Reseed each empty cluster on the point currently farthest from
        # its assigned centroid (distinct points for multiple empties).
        order = np.argsort(-dists, kind="stable")
        for rank, c in enumerate(empty):
            new[c] = Xs.row_dense(int(order[rank]))
    return new


def _lloyd(Xs: FeatureMatrix, centroids: np.ndarray, max_iter: int, tol: float):
    k = centroids.shape[0]
    labels, dists = _assign(Xs, centroids)
    sse = float(dists.sum())
    history = [sse]
    iterations = 0
    for _ in range(max_iter):
        centroids = _update_centroids(Xs, labels, dists, centroids, k)
        labels, dists = _assign(Xs, centroids)
        new_sse = float(dists.sum())
        history.append(new_sse)
        iterations += 1
        if new_sse == sse or sse - new_sse < tol * sse:
            sse = new_sse
            break
        sse = new_sse
    return centroids, labels, dists, sse, history, iterations


def _resolve_rows(X: FeatureMatrix, rows) -> np.ndarray:
    if rows is None:
        return np.arange(X.n_rows, dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)


def kmeans_fit(X: FeatureMatrix, k: int, seed: int, max_iter: int = 100,
               tol: float = 1e-4, restarts: int = 1, rows=None) -> KMeansModel:
    """Lloyd iterations from k-means++ starts; best of ``restarts`` runs.

    Stops when the relative SSE improvement falls under ``tol``. Empty
    clusters are repaired during the update step.
    """
    rows = _resolve_rows(X, rows)
    if not 1 <= k <= len(rows):
        raise ValueError(f"k={k} must be between 1 and the number of fit rows ({len(rows)})")
    Xs = X.take_rows(rows)
    best = None
    for r in range(restarts):
        rng = make_rng(subseed(seed, f"kmeans-restart-{r}"))
        centroids = _kmeanspp(Xs, k, rng)
        result = _lloyd(Xs, centroids, max_iter, tol)
        if best is None or result[3] < best[3]:
            best = result
    centroids, _, _, sse, history, iterations = best
    assignments, _ = _assign(X, centroids)
    return KMeansModel(k=k, centroids=centroids, assignments=assignments, sse=sse,
                       iterations_run=iterations, seed=seed, sse_history=history,
                       fit_rows=rows)


def minibatch_kmeans_fit(X: FeatureMatrix, k: int, batch_size: int, seed: int,
                         max_iter: int, rows=None) -> KMeansModel:
    """Mini-batch k-means with per-center 1/count learning rates.

    Batches are drawn with replacement from the fit rows; the final
    assignments and SSE come from one full pass at the end.
    """
    rows = _resolve_rows(X, rows)
    if not 1 <= k <= len(rows):
        raise ValueError(f"k={k} must be between 1 and the number of fit rows ({len(rows)})")
    if not 1 <= batch_size <= len(rows):
        raise ValueError(f"batch_size={batch_size} must be between 1 and {len(rows)}")
    Xs = X.take_rows(rows)
    rng = make_rng(seed)
    centroids = _kmeanspp(Xs, k, rng)
    counts = np.zeros(k, dtype=np.int64)
    for _ in range(max_iter):
        batch = rng.integers(0, Xs.n_rows, size=batch_size).astype(np.int64)
        batch_labels, _ = _assign(Xs.take_rows(batch), centroids)
        kernels.minibatch_update(Xs.indptr, Xs.indices, Xs.data, batch,
                                 batch_labels, centroids, counts)
    labels_fit, dists_fit = _assign(Xs, centroids)
    sse = float(dists_fit.sum())
    assignments, _ = _assign(X, centroids)
    return KMeansModel(k=k, centroids=centroids, assignments=assignments, sse=sse,
                       iterations_run=max_iter, seed=seed, sse_history=[sse],
                       fit_rows=rows)


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    peak = np.max(a, axis=axis, keepdims=True)
    peak = np.where(np.isfinite(peak), peak, 0.0)
    return np.squeeze(peak, axis=axis) + np.log(np.sum(np.exp(a - peak), axis=axis))


def _gmm_component_constants(means, variances):
    inv_var = 1.0 / variances
    comp_const = np.sum(np.log(2.0 * np.pi * variances) + means * means * inv_var, axis=1)
    return inv_var, comp_const


def _gmm_log_joint(X: FeatureMatrix, means, variances, weights, data=None):
    """Per-row log(weight * density); ``data`` overrides X.data (for x^2)."""
    inv_var, comp_const = _gmm_component_constants(means, variances)
    log_dens = kernels.gmm_log_densities(X.indptr, X.indices,
                                         X.data if data is None else data,
                                         np.ascontiguousarray(means),
                                         np.ascontiguousarray(inv_var), comp_const)
    return log_dens + np.log(weights)[None, :]


def em_fit(X: FeatureMatrix, k: int, seed: int, max_iter: int = 100,
           tol: float = 1e-5, init: Optional[KMeansModel] = None,
           rows=None, var_floor: float = VARIANCE_FLOOR) -> GmmModel:
    """EM for a diagonal-covariance Gaussian mixture.

    Initialized from a k-means model (means from centroids, variances from
    within-cluster spread clamped to the floor, weights from cluster
    proportions); fits one internally when none is supplied. E-steps run
    in log space; training stops when the relative log-likelihood
    improvement falls under ``tol``.
    """
    rows = _resolve_rows(X, rows)
    if not 1 <= k <= len(rows):
        raise ValueError(f"k={k} must be between 1 and the number of fit rows ({len(rows)})")
    if init is None:
        init = kmeans_fit(X, k, subseed(seed, "em-init"), rows=rows)
    if init.k != k or init.centroids.shape[1] != X.n_cols:
        raise ValueError("init model shape does not match")
    Xs = X.take_rows(rows)
    data_sq = Xs.data * Xs.data
    m_s, n = Xs.n_rows, Xs.n_cols

    labels = init.assignments[rows]
    sums, counts = kernels.centroid_sums(Xs.indptr, Xs.indices, Xs.data, labels, k, n)
    sums2, _ = kernels.centroid_sums(Xs.indptr, Xs.indices, data_sq, labels, k, n)
    means = init.centroids.copy()
    variances = np.empty((k, n))
    global_mean = np.asarray(sums.sum(axis=0)) / m_s
    global_var = np.asarray(sums2.sum(axis=0)) / m_s - global_mean ** 2
    for c in range(k):
        if counts[c] > 0:
            # spread of members around the centroid, per dimension
            variances[c] = (sums2[c] - 2.0 * means[c] * sums[c]) / counts[c] + means[c] ** 2
        else:
            variances[c] = global_var
    variances = np.maximum(variances, var_floor)
    weights = np.maximum(counts / len(rows), 1e-12)
    weights = weights / weights.sum()

    ll_history: list[float] = []
    joint = _gmm_log_joint(Xs, means, variances, weights)
    row_ll = _logsumexp(joint, axis=1)
    ll = float(row_ll.sum())
    ll_history.append(ll)
    iterations = 0
    for it in range(max_iter):
        if not math.isfinite(ll):
            raise RuntimeError(f"numerical failure at iteration {it}")
        resp = np.exp(joint - row_ll[:, None])
        n_k = resp.sum(axis=0)
        n_k_safe = np.maximum(n_k, 1e-12)
        weights = np.maximum(n_k / m_s, 1e-12)
        weights = weights / weights.sum()
        resp = np.ascontiguousarray(resp)
        means = kernels.weighted_column_sums(Xs.indptr, Xs.indices, Xs.data, resp, n)
        means = np.asarray(means) / n_k_safe[:, None]
        second = kernels.weighted_column_sums(Xs.indptr, Xs.indices, data_sq, resp, n)
        variances = np.maximum(np.asarray(second) / n_k_safe[:, None] - means ** 2, var_floor)

        joint = _gmm_log_joint(Xs, means, variances, weights)
        row_ll = _logsumexp(joint, axis=1)
        new_ll = float(row_ll.sum())
        ll_history.append(new_ll)
        iterations += 1
        if not math.isfinite(new_ll):
            raise RuntimeError(f"numerical failure at iteration {iterations}")
        if new_ll == ll or new_ll - ll < tol * abs(ll):
            ll = new_ll
            break
        ll = new_ll
    return GmmModel(k=k, means=means, variances=variances, weights=weights,
                    log_likelihood=ll, seed=seed, ll_history=ll_history,
                    iterations_run=iterations)


def gmm_responsibilities(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """Posterior cluster probabilities of one dense coordinate."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.means.shape[1],):
        raise ValueError(f"expected a vector of dim {model.means.shape[1]}")
    diff = x[None, :] - model.means
    log_dens = -0.5 * np.sum(np.log(2.0 * np.pi * model.variances)
                             + diff * diff / model.variances, axis=1)
    joint = log_dens + np.log(model.weights)
    return np.exp(joint - _logsumexp(joint[None, :], axis=1)[0])


def gmm_assignments(model: GmmModel, X: FeatureMatrix) -> np.ndarray:
    """Hard assignment (argmax responsibility) for every row."""
    joint = _gmm_log_joint(X, model.means, model.variances, model.weights)
    return np.argmax(joint, axis=1).astype(np.int64)


def _warm_start_fit(X: FeatureMatrix, rows: np.ndarray, prev: KMeansModel,
                    k: int, seed: int, max_iter: int, tol: float):
    """Grow the previous best model by D^2-sampled extra centers, then Lloyd.

    Adding centers can only shrink assignment distances, so the warmed fit
    never ends above the previous k's SSE; this keeps the elbow curve
    non-increasing.
    """
    Xs = X.take_rows(rows)
    rng = make_rng(seed)
    centers = np.zeros((k, X.n_cols))
    centers[:prev.k] = prev.centroids
    _, d2 = _assign(Xs, prev.centroids)
    for j in range(prev.k, k):
        total = d2.sum()
        idx = int(rng.choice(Xs.n_rows, p=d2 / total)) if total > 0 else int(rng.integers(Xs.n_rows))
        centers[j] = Xs.row_dense(idx)
        d2 = np.minimum(d2, _sq_dists_to(Xs, centers[j]))
    return _lloyd(Xs, centers, max_iter, tol)


def elbow_scan(X: FeatureMatrix, ks, seed: int, restarts: int = 3,
               drop_threshold: float = 0.02, max_iter: int = 100,
               tol: float = 1e-4, rows=None) -> ElbowCurve:
    """Best-of-restarts SSE per k plus the elbow pick.

    chosen_k is the smallest k whose relative SSE drop to the next scanned
    k falls below ``drop_threshold``; absent when no drop ever does.
    """
    ks = list(ks)
    if ks != sorted(set(ks)):
        raise ValueError("ks must be strictly ascending")
    rows = _resolve_rows(X, rows)
    points: list[tuple[int, float]] = []
    prev_model: Optional[KMeansModel] = None
    for k_val in ks:
        model = kmeans_fit(X, k_val, subseed(seed, f"elbow-k{k_val}"),
                           max_iter=max_iter, tol=tol, restarts=restarts, rows=rows)
        if prev_model is not None:
            warmed = _warm_start_fit(X, rows, prev_model, k_val,
                                     subseed(seed, f"elbow-warm-k{k_val}"), max_iter, tol)
            if warmed[3] < model.sse:
                centroids, _, _, sse, history, iterations = warmed
                assignments, _ = _assign(X, centroids)
                model = KMeansModel(k=k_val, centroids=centroids, assignments=assignments,
                                    sse=sse, iterations_run=iterations, seed=seed,
                                    sse_history=history, fit_rows=rows)
        points.append((k_val, model.sse))
        prev_model = model
    chosen: Optional[int] = None
    for (k1, s1), (_, s2) in zip(points, points[1:]):
        drop = (s1 - s2) / s1 if s1 > 0 else 0.0
        if drop < drop_threshold:
            chosen = k1
            break
    return ElbowCurve(points=points, chosen_k=chosen)


def centroid_keywords(model: Union[KMeansModel, GmmModel], vocab: VocabIndex,
                      top: int) -> list[list[str]]:
    """Per-cluster top centroid terms, highest value first, ties lexicographic."""
    centers = model.centroids if isinstance(model, KMeansModel) else model.means
    if centers.shape[1] != len(vocab):
        raise ValueError("model dimension does not match vocabulary size")
    table = []
    for c in range(centers.shape[0]):
        values = centers[c]
        ranked = sorted(((values[j], vocab.terms[j]) for j in np.flatnonzero(values > 0)),
                        key=lambda item: (-item[0], item[1]))
        table.append([term for _, term in ranked[:top]])
    return table
