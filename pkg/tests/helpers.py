"""Independent oracles and synthetic corpora shared across the suite.

Everything here is deliberately naive: plain dict/loop re-implementations
that the fast production code is checked against.
"""

import math
from collections import Counter

import numpy as np

from palate.corpus import Review
from palate.recommend import score_candidate

ARCHETYPE_POOLS = [
    ["cherry", "plum", "cassis", "violet", "mulberry", "anise",
     "clove", "cedar", "currant", "damson"],
    ["lemon", "lime", "grapefruit", "flint", "grass", "quince",
     "gooseberry", "nettle", "chalk", "zest"],
    ["peach", "apricot", "honeysuckle", "melon", "jasmine", "nectarine",
     "blossom", "mango", "guava", "lychee"],
    ["smoke", "leather", "tar", "tobacco", "game", "truffle",
     "forest", "bramble", "peat", "iron"],
    ["brioche", "yeast", "almond", "toast", "hazelnut", "biscuit",
     "cream", "butter", "ginger", "honeycomb"],
    ["fig", "raisin", "caramel", "walnut", "molasses", "prune",
     "toffee", "saffron", "marmalade", "date"],
]


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected pair-counting agreement between two labelings."""
    labels_a = list(labels_a)
    labels_b = list(labels_b)
    n = len(labels_a)
    comb2 = lambda x: x * (x - 1) / 2
    sum_cells = sum(comb2(c) for c in Counter(zip(labels_a, labels_b)).values())
    sum_a = sum(comb2(c) for c in Counter(labels_a).values())
    sum_b = sum(comb2(c) for c in Counter(labels_b).values())
    total = comb2(n)
    expected = sum_a * sum_b / total
    maximum = (sum_a + sum_b) / 2
    if maximum == expected:
        return 1.0
    return (sum_cells - expected) / (maximum - expected)


def naive_tfidf(token_lists, min_df=1, stops=frozenset()):
    """Reference TF-IDF: dict counting, explicit formulas, no shared code."""
    df = Counter()
    for tokens in token_lists:
        for term in set(tokens):
            if term not in stops and len(term) >= 2 and not term.isdigit():
                df[term] += 1
    terms = sorted(t for t, c in df.items() if c >= min_df)
    col = {t: j for j, t in enumerate(terms)}
    n_docs = len(token_lists)
    idf = {t: math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in terms}
    out = np.zeros((n_docs, len(terms)))
    for i, tokens in enumerate(token_lists):
        counts = Counter(t for t in tokens if t in col)
        for t, c in counts.items():
            out[i, col[t]] = c * idf[t]
        norm = math.sqrt(sum(v * v for v in out[i]))
        if norm > 0:
            out[i] /= norm
    return terms, out


def archetype_corpus(n_per_pool: int, seed: int, words_per_review=(14, 22),
                     price_range=(9.0, 120.0)):
    """Reviews drawn from disjoint descriptor pools; returns (reviews, labels)."""
    rng = np.random.default_rng(seed)
    reviews, labels = [], []
    rid = 0
    for pool_id, pool in enumerate(ARCHETYPE_POOLS):
        for _ in range(n_per_pool):
            n_words = int(rng.integers(*words_per_review))
            words = [pool[int(rng.integers(len(pool)))] for _ in range(n_words)]
            price = float(np.round(rng.uniform(*price_range), 2))
            reviews.append(Review(id=rid, name=f"wine {rid}", winery="w",
                                  country="c", region="r", vintage=2012,
                                  price=price, score=int(80 + rng.integers(20)),
                                  review_text=" ".join(words)))
            labels.append(pool_id)
            rid += 1
    return reviews, labels


def brute_force_pick(benchmark, space, reviews, X, assignments, excluded, config):
    """Exhaustive lowest-cost candidate for one slot; ties to lowest id."""
    nnz = np.diff(X.indptr) > 0
    best_id, best_cost = None, None
    for r in reviews:
        wid = r.id
        if r.price is None or not nnz[wid] or wid in excluded:
            continue
        if int(assignments[wid]) not in space:
            continue
        cost = score_candidate(benchmark, r, X.row_dense(wid),
                               config.lam, config.quality_over_price)
        if best_cost is None or cost < best_cost:
            best_id, best_cost = wid, cost
    return best_id, best_cost


def naive_preference(liked_clusters, disliked_clusters, n_clusters):
    """Hand formula: p_k = x_k * y_k * (1 - z_k) normalized over clusters."""
    n_liked = len(liked_clusters)
    n_dis = len(disliked_clusters)
    x = [0.0] * n_clusters
    z = [0.0] * n_clusters
    y = [0.0] * n_clusters
    for c in liked_clusters:
        x[c] += 1 / n_liked
        y[c] += 1
    for c in disliked_clusters:
        if n_dis:
            z[c] += 1 / n_dis
        y[c] += 1
    raw = [x[k] * y[k] * (1 - z[k]) for k in range(n_clusters)]
    total = sum(raw)
    if total > 0:
        return [v / total for v in raw]
    support = [1.0 if x[k] > 0 else 0.0 for k in range(n_clusters)]
    s = sum(support)
    return [v / s for v in support]
