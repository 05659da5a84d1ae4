"""Text featurization: tokenizer, vocabulary, TF-IDF design matrix.

Also houses the domain-stopword discovery loop: repeated clustering runs
surface tokens that dominate most centroids; those are candidates for the
domain stopword list after manual review.
"""

import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .matrix import FeatureMatrix
from .seeding import subseed


@dataclass(frozen=True)
class StopwordSets:
    generic: frozenset
    domain: frozenset

    @property
    def all(self) -> frozenset:
        return self.generic | self.domain


@dataclass
class VocabIndex:
    """Ordered vocabulary with per-term document frequencies.

    Column order is lexicographic, so a vocabulary is reproducible from
    the corpus alone. n_docs is the document count the vocabulary (and
    hence the idf transform) was built from.
    """
    terms: list[str]
    index: dict[str, int]
    doc_freq: np.ndarray  # int64, per-term document counts
    n_docs: int

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def idf(self) -> np.ndarray:
        """Smoothed idf: ln((1+N)/(1+df)) + 1."""
        return np.log((1.0 + self.n_docs) / (1.0 + self.doc_freq)) + 1.0


def load_stopword_file(path) -> frozenset:
    """One lowercase token per line; '#' starts a comment."""
    tokens = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.split("#", 1)[0].strip()
        if word:
            tokens.add(word.lower())
    return frozenset(tokens)


def default_stopwords() -> StopwordSets:
    """The stopword sets shipped with the package."""
    data = resources.files("palate").joinpath("data")
    with resources.as_file(data.joinpath("generic_stopwords.txt")) as p:
        generic = load_stopword_file(p)
    with resources.as_file(data.joinpath("domain_stopwords.txt")) as p:
        domain = load_stopword_file(p)
    return StopwordSets(generic=generic, domain=domain)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on punctuation/whitespace, drop short and numeric tokens.

    Stopword removal happens at vocabulary build, not here.
    """
    lowered = text.lower()
    cleaned = "".join(ch if ch.isalnum() else " " for ch in lowered)
    return [tok for tok in cleaned.split() if len(tok) >= 2 and not tok.isdigit()]


def build_vocabulary(token_lists: list[list[str]], stops: StopwordSets,
                     min_df: int = 2) -> VocabIndex:
    """Vocabulary over tokens appearing in at least ``min_df`` documents.

    Stopwords (generic and domain), sub-2-character tokens, and purely
    numeric tokens never enter the vocabulary.
    """
    if not token_lists:
        raise ValueError("no documents")
    df = Counter()
    for tokens in token_lists:
        df.update(set(tokens))
    banned = stops.all
    terms = sorted(
        term for term, count in df.items()
        if count >= min_df and term not in banned
        and len(term) >= 2 and not term.isdigit()
    )
    if not terms:
        raise ValueError("empty vocabulary")
    return VocabIndex(
        terms=terms,
        index={t: j for j, t in enumerate(terms)},
        doc_freq=np.array([df[t] for t in terms], dtype=np.int64),
        n_docs=len(token_lists),
    )


def compute_tfidf(token_lists: list[list[str]],
                  vocab: VocabIndex) -> tuple[FeatureMatrix, list[int]]:
    """Row-normalized TF-IDF design matrix plus the ids of empty rows.

    tf is the raw in-document count, idf the vocabulary's smoothed idf;
    each nonempty row is scaled to unit Euclidean norm. Out-of-vocabulary
    tokens are ignored; a document with no in-vocabulary tokens yields an
    empty row and is reported in the second return value.
    """
    idf = vocab.idf
    rows = []
    empty: list[int] = []
    for doc_id, tokens in enumerate(token_lists):
        counts = Counter(tok for tok in tokens if tok in vocab.index)
        if not counts:
            empty.append(doc_id)
            rows.append((np.empty(0, dtype=np.int64), np.empty(0)))
            continue
        cols = np.array(sorted(vocab.index[t] for t in counts), dtype=np.int64)
        tf = np.array([counts[vocab.terms[j]] for j in cols], dtype=np.float64)
        vals = tf * idf[cols]
        vals /= math.sqrt(float(np.dot(vals, vals)))
        rows.append((cols, vals))
    return FeatureMatrix.from_rows(rows, n_cols=len(vocab)), empty


def discover_domain_stopwords(X: FeatureMatrix, vocab: VocabIndex, runs: int,
                              k: int, top: int = 25, fraction: float = 0.75,
                              seed: int = 0) -> list[str]:
    """Candidate domain stopwords from repeated clustering runs.

    Runs k-means ``runs`` times with distinct seeds, collects the ``top``
    highest-valued centroid terms of every cluster, and returns the tokens
    present in at least ``fraction`` of all clusters, most-frequent first.
    Candidates are for manual review; nothing is removed here.
    """
    from .cluster import centroid_keywords, kmeans_fit

    if runs < 1:
        raise ValueError("runs must be >= 1")
    appearances = Counter()
    for run in range(runs):
        model = kmeans_fit(X, k, seed=subseed(seed, f"stopword-discovery-{run}"))
        for keywords in centroid_keywords(model, vocab, top):
            appearances.update(keywords)
    total_clusters = runs * k
    candidates = [(count / total_clusters, tok) for tok, count in appearances.items()
                  if count / total_clusters >= fraction]
    candidates.sort(key=lambda item: (-item[0], item[1]))
    return [tok for _, tok in candidates]
