import numpy as np
import pytest

from helpers import ARCHETYPE_POOLS, adjusted_rand_index, archetype_corpus
from palate.cluster import (DEFAULT_ELBOW_KS, ElbowCurve, centroid_keywords,
                            elbow_scan, em_fit, gmm_assignments,
                            gmm_responsibilities, kmeans_fit,
                            minibatch_kmeans_fit)
from palate.featurize import (StopwordSets, build_vocabulary, compute_tfidf,
                              tokenize)
from palate.matrix import FeatureMatrix

NO_STOPS = StopwordSets(frozenset(), frozenset())


def blobs(seed, k=3, per=40, dim=6, spread=0.05):
    rng = np.random.default_rng(seed)
    centers = np.eye(dim)[:k]
    dense = np.vstack([np.abs(rng.normal(centers[c], spread, size=(per, dim)))
                       for c in range(k)])
    labels = np.repeat(np.arange(k), per)
    return FeatureMatrix.from_dense(dense), labels


def corpus_matrix(n_per_pool, seed):
    reviews, labels = archetype_corpus(n_per_pool, seed)
    tokens = [tokenize(r.review_text) for r in reviews]
    vocab = build_vocabulary(tokens, NO_STOPS, min_df=2)
    X, _ = compute_tfidf(tokens, vocab)
    return X, labels, vocab


def test_kmeans_recovers_blobs():
    X, truth = blobs(0)
    model = kmeans_fit(X, 3, seed=1, restarts=3)
    assert adjusted_rand_index(model.assignments, truth) == 1.0
    assert model.centroids.shape == (3, 6)
    assert len(model.assignments) == X.n_rows


def test_kmeans_sse_monotone_and_recorded():
    X, _ = blobs(7)
    model = kmeans_fit(X, 4, seed=3)
    h = model.sse_history
    assert model.sse == h[-1]
    for a, b in zip(h, h[1:]):
        assert b <= a + 1e-9 * max(a, 1.0)
    assert model.iterations_run == len(h) - 1


def test_kmeans_k_bounds():
    X, _ = blobs(0)
    with pytest.raises(ValueError):
        kmeans_fit(X, 0, seed=0)
    with pytest.raises(ValueError):
        kmeans_fit(X, X.n_rows + 1, seed=0)


def test_kmeans_k_equals_n_gives_zero_sse():
    dense = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
    model = kmeans_fit(FeatureMatrix.from_dense(dense), 3, seed=5)
    assert model.sse == 0.0


def test_kmeans_deterministic():
    X, _ = blobs(2)
    a = kmeans_fit(X, 3, seed=9, restarts=2)
    b = kmeans_fit(X, 3, seed=9, restarts=2)
    np.testing.assert_array_equal(a.centroids, b.centroids)
    np.testing.assert_array_equal(a.assignments, b.assignments)
    assert a.sse == b.sse


def test_kmeans_restarts_never_hurt():
    X, _ = blobs(11, k=4, per=25)
    one = kmeans_fit(X, 4, seed=13, restarts=1)
    many = kmeans_fit(X, 4, seed=13, restarts=5)
    assert many.sse <= one.sse + 1e-12


def test_kmeans_fit_rows_subset():
    # one empty row: fit on nonempty rows, but assignments cover all rows
    dense = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [1.1, 0.0]])
    X = FeatureMatrix.from_dense(dense)
    model = kmeans_fit(X, 2, seed=1, rows=X.nonempty_rows())
    assert len(model.assignments) == 4
    assert model.assignments[0] == model.assignments[3]


def test_minibatch_reaches_blob_structure():
    X, truth = blobs(4, k=3, per=60)
    model = minibatch_kmeans_fit(X, 3, batch_size=30, seed=8, max_iter=60)
    assert adjusted_rand_index(model.assignments, truth) >= 0.9


def test_minibatch_deterministic():
    X, _ = blobs(4)
    a = minibatch_kmeans_fit(X, 3, batch_size=20, seed=5, max_iter=30)
    b = minibatch_kmeans_fit(X, 3, batch_size=20, seed=5, max_iter=30)
    np.testing.assert_array_equal(a.centroids, b.centroids)


def test_em_loglik_monotone():
    X, _ = blobs(6)
    model = em_fit(X, 3, seed=2)
    ll = model.ll_history
    assert model.log_likelihood == ll[-1]
    for a, b in zip(ll, ll[1:]):
        assert b >= a - 1e-7 * abs(a)


def test_em_respects_variance_floor_and_weights():
    X, _ = blobs(1)
    model = em_fit(X, 3, seed=4)
    assert model.variances.min() >= 1e-6
    assert model.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert (model.weights > 0).all()


def test_em_accepts_external_init():
    X, _ = blobs(3)
    km = kmeans_fit(X, 3, seed=7, restarts=2)
    model = em_fit(X, 3, seed=7, init=km)
    assert adjusted_rand_index(gmm_assignments(model, X),
                               km.assignments) == 1.0


def test_em_init_shape_mismatch():
    X, _ = blobs(3)
    km = kmeans_fit(X, 2, seed=0)
    with pytest.raises(ValueError):
        em_fit(X, 3, seed=0, init=km)


def test_responsibilities_sum_to_one():
    X, _ = blobs(5)
    model = em_fit(X, 3, seed=5)
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = np.abs(rng.normal(0, 1, size=X.n_cols))
        r = gmm_responsibilities(model, x)
        assert r.sum() == pytest.approx(1.0, abs=1e-9)
        assert (r >= 0).all()


def test_responsibilities_symmetric_case():
    # two components mirrored around the origin: a point equidistant from
    # both must split its responsibility exactly in half
    from palate.cluster import GmmModel
    model = GmmModel(k=2,
                     means=np.array([[1.0, 0.0], [-1.0, 0.0]]),
                     variances=np.full((2, 2), 0.5),
                     weights=np.array([0.5, 0.5]),
                     log_likelihood=0.0, seed=0)
    r = gmm_responsibilities(model, np.array([0.0, 3.7]))
    assert r[0] == pytest.approx(0.5, abs=1e-9)
    assert r[1] == pytest.approx(0.5, abs=1e-9)


def test_responsibilities_input_validation():
    X, _ = blobs(5)
    model = em_fit(X, 2, seed=5)
    with pytest.raises(ValueError):
        gmm_responsibilities(model, np.zeros(X.n_cols + 1))


def test_em_k_bounds():
    X, _ = blobs(5)
    with pytest.raises(ValueError):
        em_fit(X, 0, seed=1)
    with pytest.raises(ValueError):
        em_fit(X, X.n_rows + 1, seed=1)


def test_elbow_curve_non_increasing_and_chosen():
    X, labels, _ = corpus_matrix(30, seed=21)
    curve = elbow_scan(X, [2, 4, 6, 8, 10], seed=3, restarts=3)
    sses = [s for _, s in curve.points]
    assert all(b <= a + 1e-9 for a, b in zip(sses, sses[1:]))
    assert isinstance(curve, ElbowCurve)
    if curve.chosen_k is not None:
        assert curve.chosen_k in [2, 4, 6, 8]


def test_elbow_rejects_unsorted_ks():
    X, _ = blobs(0)
    with pytest.raises(ValueError):
        elbow_scan(X, [4, 2], seed=0)


def test_elbow_single_k_has_no_choice():
    X, _ = blobs(0)
    curve = elbow_scan(X, [2], seed=0, restarts=1)
    assert curve.chosen_k is None
    assert len(curve.points) == 1


def test_default_elbow_ks_includes_operating_point():
    assert 32 in DEFAULT_ELBOW_KS


def test_centroid_keywords_ranked_and_tied_lexicographically():
    from palate.cluster import KMeansModel
    from palate.featurize import VocabIndex
    terms = ["apple", "berry", "cedar", "date"]
    vocab = VocabIndex(terms=terms, index={t: i for i, t in enumerate(terms)},
                       doc_freq=np.ones(4, dtype=np.int64), n_docs=4)
    centroids = np.array([[0.2, 0.9, 0.2, 0.0],
                          [0.0, 0.0, 0.0, 0.4]])
    model = KMeansModel(k=2, centroids=centroids,
                        assignments=np.zeros(1, dtype=np.int64), sse=0.0,
                        iterations_run=0, seed=0)
    table = centroid_keywords(model, vocab, top=3)
    assert table[0] == ["berry", "apple", "cedar"]   # tie 0.2/0.2 -> lexicographic
    assert table[1] == ["date"]                      # zeros never listed


def test_centroid_keywords_on_fitted_corpus():
    X, labels, vocab = corpus_matrix(25, seed=2)
    km = kmeans_fit(X, 6, seed=5, restarts=5)
    table = centroid_keywords(km, vocab, top=10)
    # every cluster's keyword list should stay inside one descriptor pool
    pools = [set(p) for p in ARCHETYPE_POOLS]
    for words in table:
        overlaps = [len(set(words) & pool) for pool in pools]
        assert max(overlaps) >= 8


def test_recovery_on_archetype_corpus():
    X, truth, _ = corpus_matrix(40, seed=17)
    km = kmeans_fit(X, 6, seed=23, restarts=5, rows=X.nonempty_rows())
    assert adjusted_rand_index(km.assignments, truth) >= 0.9
    gm = em_fit(X, 6, seed=23, init=km, rows=X.nonempty_rows())
    assert adjusted_rand_index(gmm_assignments(gm, X), truth) >= 0.9
