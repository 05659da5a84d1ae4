"""Model persistence: one self-describing JSON bundle per fitted pipeline.

The bundle embeds the retained corpus, the TF-IDF matrix (rows as
(index, value) pairs), both cluster models, the keyword table, optional
word vectors, and recommender defaults. A sha256 digest of the canonical
corpus serialization guards against serving models over the wrong data.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from .cluster import (GmmModel, KMeansModel, centroid_keywords, em_fit,
                      gmm_assignments, kmeans_fit, minibatch_kmeans_fit)
from .corpus import Review, review_to_record, serialize_reviews
from .embed import WordVectors
from .featurize import (StopwordSets, VocabIndex, build_vocabulary,
                        compute_tfidf, default_stopwords, tokenize)
from .matrix import FeatureMatrix
from .recommend import RecommenderConfig
from .seeding import subseed

FORMAT_VERSION = 1
KEYWORDS_PER_CLUSTER = 10


class BundleError(ValueError):
    code = "bundle_error"


class BundleVersionError(BundleError):
    code = "unsupported_version"


class BundleDigestError(BundleError):
    code = "digest_mismatch"


class BundleCorruptError(BundleError):
    code = "corrupt_bundle"


@dataclass
class ModelBundle:
    format_version: int
    corpus_digest: str
    reviews: list[Review]
    stopwords: StopwordSets
    vocab: VocabIndex
    X: FeatureMatrix
    empty_row_ids: list[int]
    kmeans: KMeansModel
    gmm: GmmModel
    assignments: np.ndarray          # hard gmm assignment per review
    keyword_table: list[list[str]]   # top KEYWORDS_PER_CLUSTER terms per cluster
    config: RecommenderConfig
    word_vectors: Optional[WordVectors] = None


def corpus_digest(reviews: list[Review]) -> str:
    return hashlib.sha256(serialize_reviews(reviews)).hexdigest()


def build_bundle(reviews: list[Review], k: int, seed: int,
                 config: Optional[RecommenderConfig] = None,
                 stopwords: Optional[StopwordSets] = None, min_df: int = 2,
                 algorithm: str = "kmeans", restarts: int = 3,
                 batch_size: int = 256, max_iter: int = 100) -> ModelBundle:
    """Run the fit pipeline over retained reviews and assemble a bundle.

    ``algorithm`` picks the hard-clustering stage (kmeans | minibatch |
    gmm, the last an alias for kmeans since EM always runs on top of it).
    Rows with no in-vocabulary tokens are excluded from fitting but keep
    their ids everywhere else.
    """
    if algorithm not in ("kmeans", "minibatch", "gmm"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    stopwords = stopwords or default_stopwords()
    config = config or RecommenderConfig(seed=seed)
    tokens = [tokenize(r.review_text) for r in reviews]
    vocab = build_vocabulary(tokens, stopwords, min_df=min_df)
    X, empty_ids = compute_tfidf(tokens, vocab)
    rows = X.nonempty_rows()
    if algorithm == "minibatch":
        km = minibatch_kmeans_fit(X, k, batch_size=min(batch_size, len(rows)),
                                  seed=subseed(seed, "kmeans"),
                                  max_iter=max_iter, rows=rows)
    else:
        km = kmeans_fit(X, k, subseed(seed, "kmeans"), max_iter=max_iter,
                        restarts=restarts, rows=rows)
    gmm = em_fit(X, k, subseed(seed, "gmm"), max_iter=max_iter, init=km, rows=rows)
    assignments = gmm_assignments(gmm, X)
    return ModelBundle(
        format_version=FORMAT_VERSION,
        corpus_digest=corpus_digest(reviews),
        reviews=reviews,
        stopwords=stopwords,
        vocab=vocab,
        X=X,
        empty_row_ids=list(empty_ids),
        kmeans=km,
        gmm=gmm,
        assignments=assignments,
        keyword_table=centroid_keywords(gmm, vocab, KEYWORDS_PER_CLUSTER),
        config=config,
    )


def _matrix_to_rows(X: FeatureMatrix) -> list:
    rows = []
    for i in range(X.n_rows):
        idx, vals = X.row(i)
        rows.append([[int(a), float(b)] for a, b in zip(idx, vals)])
    return rows


def _matrix_from_rows(rows: list, n_cols: int) -> FeatureMatrix:
    pairs = []
    for row in rows:
        idx = np.array([p[0] for p in row], dtype=np.int64)
        vals = np.array([p[1] for p in row])
        pairs.append((idx, vals))
    return FeatureMatrix.from_rows(pairs, n_cols)


def _bundle_to_doc(b: ModelBundle) -> dict:
    doc = {
        "format_version": b.format_version,
        "corpus_digest": b.corpus_digest,
        "reviews": [review_to_record(r) for r in b.reviews],
        "stopwords": {"generic": sorted(b.stopwords.generic),
                      "domain": sorted(b.stopwords.domain)},
        "vocab": {"terms": list(b.vocab.terms),
                  "doc_freq": b.vocab.doc_freq.tolist(),
                  "n_docs": b.vocab.n_docs},
        "matrix": {"n_rows": b.X.n_rows, "n_cols": b.X.n_cols,
                   "rows": _matrix_to_rows(b.X)},
        "empty_row_ids": list(b.empty_row_ids),
        "kmeans": {"k": b.kmeans.k,
                   "centroids": b.kmeans.centroids.tolist(),
                   "assignments": b.kmeans.assignments.tolist(),
                   "sse": b.kmeans.sse,
                   "iterations_run": b.kmeans.iterations_run,
                   "seed": b.kmeans.seed,
                   "sse_history": list(b.kmeans.sse_history),
                   "fit_rows": b.kmeans.fit_rows.tolist()},
        "gmm": {"k": b.gmm.k,
                "means": b.gmm.means.tolist(),
                "variances": b.gmm.variances.tolist(),
                "weights": b.gmm.weights.tolist(),
                "log_likelihood": b.gmm.log_likelihood,
                "seed": b.gmm.seed,
                "ll_history": list(b.gmm.ll_history),
                "iterations_run": b.gmm.iterations_run},
        "assignments": b.assignments.tolist(),
        "keyword_table": b.keyword_table,
        "config": asdict(b.config),
        "word_vectors": None,
    }
    if b.word_vectors is not None:
        wv = b.word_vectors
        doc["word_vectors"] = {"dim": wv.dim,
                               "main": wv.main.tolist(),
                               "context": wv.context.tolist(),
                               "bias_main": wv.bias_main.tolist(),
                               "bias_context": wv.bias_context.tolist(),
                               "epoch_losses": list(wv.epoch_losses)}
    return doc


def _review_from_record(rec: dict, rid: int) -> Review:
    price = rec.get("price")
    vintage = rec.get("vintage")
    return Review(id=rid, name=rec["name"], winery=rec["winery"],
                  country=rec["country"], region=rec["region"],
                  vintage=None if vintage in (None, "NV") else int(vintage),
                  price=None if price in (None, "NA") else float(str(price).lstrip("$")),
                  score=int(rec["score"]), review_text=rec["review"])


def _bundle_from_doc(doc: dict) -> ModelBundle:
    reviews = [_review_from_record(rec, i) for i, rec in enumerate(doc["reviews"])]
    stop = StopwordSets(generic=frozenset(doc["stopwords"]["generic"]),
                        domain=frozenset(doc["stopwords"]["domain"]))
    vdoc = doc["vocab"]
    vocab = VocabIndex(terms=list(vdoc["terms"]),
                       index={t: i for i, t in enumerate(vdoc["terms"])},
                       doc_freq=np.asarray(vdoc["doc_freq"], dtype=np.int64),
                       n_docs=int(vdoc["n_docs"]))
    X = _matrix_from_rows(doc["matrix"]["rows"], int(doc["matrix"]["n_cols"]))
    kdoc = doc["kmeans"]
    km = KMeansModel(k=int(kdoc["k"]),
                     centroids=np.asarray(kdoc["centroids"]),
                     assignments=np.asarray(kdoc["assignments"], dtype=np.int64),
                     sse=float(kdoc["sse"]),
                     iterations_run=int(kdoc["iterations_run"]),
                     seed=int(kdoc["seed"]),
                     sse_history=list(kdoc["sse_history"]),
                     fit_rows=np.asarray(kdoc["fit_rows"], dtype=np.int64))
    gdoc = doc["gmm"]
    gmm = GmmModel(k=int(gdoc["k"]),
                   means=np.asarray(gdoc["means"]),
                   variances=np.asarray(gdoc["variances"]),
                   weights=np.asarray(gdoc["weights"]),
                   log_likelihood=float(gdoc["log_likelihood"]),
                   seed=int(gdoc["seed"]),
                   ll_history=list(gdoc["ll_history"]),
                   iterations_run=int(gdoc["iterations_run"]))
    wv = None
    if doc.get("word_vectors"):
        wdoc = doc["word_vectors"]
        wv = WordVectors(dim=int(wdoc["dim"]),
                         main=np.asarray(wdoc["main"]),
                         context=np.asarray(wdoc["context"]),
                         bias_main=np.asarray(wdoc["bias_main"]),
                         bias_context=np.asarray(wdoc["bias_context"]),
                         epoch_losses=list(wdoc["epoch_losses"]))
    return ModelBundle(format_version=int(doc["format_version"]),
                       corpus_digest=doc["corpus_digest"],
                       reviews=reviews, stopwords=stop, vocab=vocab, X=X,
                       empty_row_ids=[int(i) for i in doc["empty_row_ids"]],
                       kmeans=km, gmm=gmm,
                       assignments=np.asarray(doc["assignments"], dtype=np.int64),
                       keyword_table=[list(ws) for ws in doc["keyword_table"]],
                       config=RecommenderConfig(**doc["config"]),
                       word_vectors=wv)


def save_bundle(bundle: ModelBundle, path) -> None:
    """Write the bundle as canonical JSON (sorted keys, fixed separators),
    so identical bundles produce byte-identical files."""
    text = json.dumps(_bundle_to_doc(bundle), sort_keys=True, separators=(",", ":"))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_bundle(path) -> ModelBundle:
    """Load and validate a bundle file.

    Raises BundleVersionError on a format mismatch, BundleCorruptError on
    unparseable or incomplete content, and BundleDigestError when the
    embedded corpus no longer hashes to the stored digest.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleCorruptError(f"corrupt bundle: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise BundleCorruptError("corrupt bundle: missing format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise BundleVersionError(
            f"unsupported version {doc['format_version']} (expected {FORMAT_VERSION})")
    try:
        bundle = _bundle_from_doc(doc)
    except (KeyError, TypeError, IndexError) as exc:
        raise BundleCorruptError(f"corrupt bundle: {exc!r}") from exc
    if corpus_digest(bundle.reviews) != bundle.corpus_digest:
        raise BundleDigestError("corpus digest mismatch")
    return bundle


def config_with_seed(bundle: ModelBundle, seed: int) -> RecommenderConfig:
    return replace(bundle.config, seed=seed)
