import numpy as np
import pytest

from helpers import ARCHETYPE_POOLS, archetype_corpus
from palate.embed import (CooccurrenceTable, build_cooccurrence,
                          cooccurrence_weight, embed_corpus, embed_review,
                          train_glove)
from palate.featurize import (StopwordSets, VocabIndex, build_vocabulary,
                              compute_tfidf, tokenize)

NO_STOPS = StopwordSets(frozenset(), frozenset())


def tiny_vocab(terms):
    return VocabIndex(terms=list(terms), index={t: i for i, t in enumerate(terms)},
                      doc_freq=np.ones(len(terms), dtype=np.int64), n_docs=len(terms))


def test_adjacent_pair_weight():
    vocab = tiny_vocab(["cherry", "oak"])
    t = build_cooccurrence([["cherry", "oak"]], vocab, window=1)
    assert t.entries[(0, 1)] == 1.0
    assert t.entries[(1, 0)] == 1.0


def test_distance_weighting():
    vocab = tiny_vocab(["cherry", "oak", "plum"])
    t = build_cooccurrence([["cherry", "oak", "plum"]], vocab, window=2)
    assert t.entries[(0, 2)] == 0.5


def test_window_limits_pairs():
    vocab = tiny_vocab(["cherry", "oak", "plum"])
    t = build_cooccurrence([["cherry", "oak", "plum"]], vocab, window=1)
    assert (0, 2) not in t.entries


def test_empty_corpus_gives_empty_table():
    vocab = tiny_vocab(["cherry"])
    t = build_cooccurrence([], vocab)
    assert len(t) == 0


def test_oov_occupies_position_without_pairing():
    vocab = tiny_vocab(["cherry", "plum"])
    t = build_cooccurrence([["cherry", "zzz", "plum"]], vocab, window=2)
    assert t.entries[(0, 1)] == 0.5      # distance 2 across the OOV token
    assert all(0 <= i <= 1 and 0 <= j <= 1 for i, j in t.entries)


def test_no_self_pairs_and_symmetry():
    vocab = tiny_vocab(["cherry", "plum"])
    t = build_cooccurrence([["cherry", "cherry", "plum", "cherry"]], vocab, window=3)
    assert all(i != j for i, j in t.entries)
    for (i, j), v in t.entries.items():
        assert t.entries[(j, i)] == v
        assert v > 0


def test_weight_function():
    assert cooccurrence_weight(100, 100, 0.75) == 1.0
    assert cooccurrence_weight(150, 100, 0.75) == 1.0
    assert cooccurrence_weight(25, 100, 0.75) == pytest.approx(0.3536, abs=5e-5)


def test_train_requires_entries():
    with pytest.raises(ValueError, match="empty"):
        train_glove(CooccurrenceTable({}, 5, 3), epochs=1)


def test_training_deterministic_and_finite():
    vocab = tiny_vocab(["cherry", "plum", "oak", "lemon"])
    docs = [["cherry", "plum", "oak"], ["lemon", "cherry"], ["plum", "oak"]] * 10
    cooc = build_cooccurrence(docs, vocab)
    a = train_glove(cooc, dim=6, epochs=8, seed=3)
    b = train_glove(cooc, dim=6, epochs=8, seed=3)
    np.testing.assert_array_equal(a.main, b.main)
    np.testing.assert_array_equal(a.context, b.context)
    assert a.epoch_losses == b.epoch_losses
    assert np.isfinite(a.combined()).all()
    assert len(a.epoch_losses) == 8


def test_loss_mostly_decreases():
    vocab = tiny_vocab(["cherry", "plum", "oak", "lemon", "smoke", "tar"])
    rng = np.random.default_rng(0)
    docs = [[vocab.terms[int(rng.integers(6))] for _ in range(8)] for _ in range(100)]
    cooc = build_cooccurrence(docs, vocab)
    vec = train_glove(cooc, dim=10, epochs=20, seed=1)
    drops = sum(b < a for a, b in zip(vec.epoch_losses, vec.epoch_losses[1:]))
    assert drops >= 0.9 * (len(vec.epoch_losses) - 1)


def test_planted_cooccurrence_geometry():
    vocab = tiny_vocab(["smoky", "tobacco", "lemon", "grass", "cherry"])
    docs = [["smoky", "tobacco", "cherry"]] * 50 + [["lemon", "grass"]] * 50
    cooc = build_cooccurrence(docs, vocab)
    for seed in range(5):
        vec = train_glove(cooc, dim=8, epochs=30, seed=seed)
        C = vec.combined()
        def cos(a, b):
            return float(C[a] @ C[b]) / (np.linalg.norm(C[a]) * np.linalg.norm(C[b]))
        assert cos(0, 1) > cos(0, 2), f"seed {seed}"


def test_embed_single_token_is_its_vector():
    vocab = tiny_vocab(["cherry", "plum"])
    cooc = build_cooccurrence([["cherry", "plum"]] * 5, vocab)
    vec = train_glove(cooc, dim=4, epochs=3, seed=0)
    out, ok = embed_review(["cherry"], vec, (np.array([0]), np.array([0.7])))
    assert ok
    np.testing.assert_allclose(out, vec.combined()[0], atol=1e-12)


def test_embed_equal_weights_is_midpoint():
    vocab = tiny_vocab(["cherry", "plum"])
    cooc = build_cooccurrence([["cherry", "plum"]] * 5, vocab)
    vec = train_glove(cooc, dim=4, epochs=3, seed=0)
    mid, _ = embed_review([], vec, (np.array([0, 1]), np.array([0.5, 0.5])))
    np.testing.assert_allclose(mid, vec.combined()[:2].mean(axis=0), atol=1e-12)


def test_embed_scale_invariant():
    vocab = tiny_vocab(["cherry", "plum", "oak"])
    cooc = build_cooccurrence([["cherry", "plum", "oak"]] * 5, vocab)
    vec = train_glove(cooc, dim=4, epochs=3, seed=0)
    idx = np.array([0, 2])
    w = np.array([0.3, 1.1])
    a, _ = embed_review([], vec, (idx, w))
    b, _ = embed_review([], vec, (idx, w * 37.0))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_embed_empty_flagged():
    cooc = CooccurrenceTable({(0, 1): 2.0, (1, 0): 2.0}, window=5, vocab_size=2)
    vec = train_glove(cooc, dim=4, epochs=1, seed=0)
    out, ok = embed_review([], vec, (np.array([], dtype=np.int64), np.array([])))
    assert not ok
    assert (out == 0).all()


def test_same_archetype_embeddings_are_closer():
    reviews, labels = archetype_corpus(20, seed=9)
    tokens = [tokenize(r.review_text) for r in reviews]
    vocab = build_vocabulary(tokens, NO_STOPS, min_df=2)
    X, _ = compute_tfidf(tokens, vocab)
    cooc = build_cooccurrence(tokens, vocab)
    vec = train_glove(cooc, dim=12, epochs=25, seed=4)
    E, empty = embed_corpus(X, vec)
    assert not empty
    norms = np.linalg.norm(E, axis=1, keepdims=True)
    U = E / norms
    labels = np.asarray(labels)
    same, cross = [], []
    for a in range(0, len(U), 7):
        for b in range(a + 1, len(U), 11):
            (same if labels[a] == labels[b] else cross).append(float(U[a] @ U[b]))
    assert np.mean(same) > np.mean(cross)
