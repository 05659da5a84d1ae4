"""Preference-weighted recommendation over fitted flavor clusters.

The history path samples a cluster from the user's like/dislike profile,
perturbs a liked wine into a noisy benchmark coordinate, widens the
search to the runner-up cluster when the posterior is close, and picks
the candidate minimizing price/quality + lambda * distance. Cold start
replaces the history draw with keyword-matched cluster centroids.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cluster import GmmModel, gmm_assignments, gmm_responsibilities
from .corpus import Review
from .featurize import VocabIndex
from .matrix import FeatureMatrix
from .seeding import make_rng, subseed

log = logging.getLogger(__name__)

LIKED = "liked"
DISLIKED = "disliked"
MAX_SAMPLE_ATTEMPTS = 32
SLOT_COUNT = 4  # 3 bets + 1 wildcard


class ColdStartRequired(ValueError):
    """History has no liked wine, so preferences are undefined."""


class NoMatchingPalate(ValueError):
    """None of the offered keywords matches any cluster."""


class InsufficientCandidates(ValueError):
    """Too few priced, unseen wines to assemble a recommendation set."""


class UnknownWine(ValueError):
    """A wine id does not exist in the corpus."""


class UserHistory:
    """Like/dislike record keyed by wine id; the latest verdict wins."""

    def __init__(self, pairs: Sequence[tuple[int, str]] = ()):
        self._verdicts: dict[int, str] = {}
        for wine_id, verdict in pairs:
            self.add(wine_id, verdict)

    def add(self, wine_id: int, verdict: str) -> None:
        if verdict not in (LIKED, DISLIKED):
            raise ValueError(f"verdict must be '{LIKED}' or '{DISLIKED}', got {verdict!r}")
        wine_id = int(wine_id)
        # re-judging moves the wine to the end with its new verdict
        self._verdicts.pop(wine_id, None)
        self._verdicts[wine_id] = verdict

    @property
    def entries(self) -> list[tuple[int, str]]:
        return list(self._verdicts.items())

    def liked_ids(self) -> list[int]:
        return [w for w, v in self._verdicts.items() if v == LIKED]

    def disliked_ids(self) -> list[int]:
        return [w for w, v in self._verdicts.items() if v == DISLIKED]

    def ids(self) -> list[int]:
        return list(self._verdicts)

    def __len__(self) -> int:
        return len(self._verdicts)

    def __contains__(self, wine_id: int) -> bool:
        return int(wine_id) in self._verdicts

    @classmethod
    def parse_lines(cls, lines) -> "UserHistory":
        """Parse `wine_id,liked|disliked` lines; blanks and # comments skipped."""
        hist = cls()
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2 or not parts[0].lstrip("-").isdigit():
                raise ValueError(f"line {lineno}: expected 'wine_id,liked|disliked', got {line!r}")
            try:
                hist.add(int(parts[0]), parts[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
        return hist

    @classmethod
    def parse_file(cls, path) -> "UserHistory":
        with open(path, encoding="utf-8") as fh:
            return cls.parse_lines(fh)


@dataclass
class ClusterPreference:
    """Per-cluster preference profile and the sampling distribution p."""
    x: np.ndarray  # share of the user's liked wines in each cluster
    y: np.ndarray  # history wine count per cluster
    z: np.ndarray  # share of the user's disliked wines in each cluster
    p: np.ndarray


@dataclass(frozen=True)
class BenchmarkProvenance:
    kind: str          # "history" or "centroid"
    source_id: int     # liked wine id, or the sampled cluster id
    cluster: int       # cluster the benchmark was drawn around
    noise_seed: int    # seed of the slot's generator stream


@dataclass
class WinePick:
    wine_id: int
    cost: float
    value_term: float      # price/quality, or quality/price when flipped
    distance: float        # Euclidean distance to the benchmark
    source_clusters: tuple[int, ...]
    benchmark: BenchmarkProvenance
    benchmark_coord: Optional[np.ndarray] = None  # kept for offline audits


@dataclass
class RecommendationSet:
    bets: list[WinePick]   # exactly 3
    wildcard: WinePick

    @property
    def picks(self) -> list[WinePick]:
        return [*self.bets, self.wildcard]

    def wine_ids(self) -> list[int]:
        return [p.wine_id for p in self.picks]

    @property
    def benchmarks(self) -> list[BenchmarkProvenance]:
        return [p.benchmark for p in self.picks]


@dataclass
class RecommenderConfig:
    lam: float = 1.0
    noise_scale: float = 0.1
    wildcard_scale: float = 1.0
    expansion_ratio: float = 0.8
    seed: int = 0
    quality_over_price: bool = False  # flip the value term to score/price

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be >= 0")
        if self.wildcard_scale <= self.noise_scale:
            raise ValueError("wildcard_scale must exceed noise_scale")
        if not 0 <= self.expansion_ratio <= 1:
            raise ValueError("expansion_ratio must be in [0, 1]")


def _check_ids(ids, limit: int) -> None:
    for wid in ids:
        if not 0 <= wid < limit:
            raise UnknownWine(f"unknown wine id {wid}")


def cluster_preferences(history: UserHistory, assignments: np.ndarray,
                        n_clusters: int) -> ClusterPreference:
    """p_k = x_k * y_k * (1 - z_k), normalized over clusters.

    x and z are the shares of the user's liked (resp. disliked) wines
    that fall in cluster k; y is the raw history count there. A zero
    normalizer falls back to uniform over clusters holding a liked wine.
    """
    liked = history.liked_ids()
    disliked = history.disliked_ids()
    _check_ids(history.ids(), len(assignments))
    if not liked:
        raise ColdStartRequired("cold start required")
    liked_counts = np.bincount(assignments[liked], minlength=n_clusters).astype(np.float64)
    x = liked_counts / len(liked)
    if disliked:
        z = np.bincount(assignments[disliked], minlength=n_clusters) / len(disliked)
    else:
        z = np.zeros(n_clusters)
    y = np.bincount(assignments[history.ids()], minlength=n_clusters).astype(np.float64)
    unnorm = x * y * (1.0 - z)
    total = unnorm.sum()
    if total > 0:
        p = unnorm / total
    else:
        support = liked_counts > 0
        p = support / support.sum()
    return ClusterPreference(x=x, y=y, z=z, p=p)


def sample_cluster(pref: ClusterPreference, rng: np.random.Generator) -> int:
    """One multinomial draw over the preference distribution."""
    return int(rng.choice(len(pref.p), p=pref.p))


def sample_benchmark(cluster: int, history: UserHistory, X: FeatureMatrix,
                     scale: float, model: GmmModel, rng: np.random.Generator,
                     assignments: Optional[np.ndarray] = None) -> tuple[np.ndarray, int]:
    """Perturb a uniformly chosen liked wine from the cluster.

    Noise is independent per dimension with std scale * sqrt(cluster
    variance); coordinates are clamped at zero. Returns the coordinate
    and the chosen wine id.
    """
    liked = history.liked_ids()
    if assignments is None:
        rows = np.asarray(liked, dtype=np.int64)
        labels = gmm_assignments(model, X.take_rows(rows))
        members = [w for w, c in zip(liked, labels) if c == cluster]
    else:
        members = [w for w in liked if assignments[w] == cluster]
    if not members:
        raise ValueError(f"cluster {cluster} holds no liked history wine")
    wine_id = members[int(rng.integers(len(members)))]
    coord = X.row_dense(wine_id)
    sigma = scale * np.sqrt(model.variances[cluster])
    coord = coord + rng.normal(0.0, 1.0, size=len(coord)) * sigma
    return np.maximum(coord, 0.0), wine_id


def expand_search_space(model: GmmModel, benchmark: np.ndarray,
                        ratio: float = 0.8) -> set[int]:
    """Top-responsibility cluster, plus the runner-up when nearly tied."""
    resp = gmm_responsibilities(model, benchmark)
    order = np.argsort(-resp, kind="stable")
    space = {int(order[0])}
    if len(resp) > 1 and resp[order[1]] >= ratio * resp[order[0]]:
        space.add(int(order[1]))
    return space


def score_candidate(benchmark: np.ndarray, review: Review, row: np.ndarray,
                    lam: float, quality_over_price: bool = False) -> float:
    """Cost of recommending ``review`` against the benchmark coordinate.

    Default form is price/quality + lambda * ||w - w'||; the flipped form
    swaps the value term to quality/price (still minimized).
    """
    if review.price is None:
        raise ValueError(f"wine {review.id} has no price")
    value = (review.score / review.price) if quality_over_price else (review.price / review.score)
    return value + lam * float(np.linalg.norm(benchmark - row))


def _value_term(review: Review, quality_over_price: bool) -> float:
    return (review.score / review.price) if quality_over_price else (review.price / review.score)


def _best_candidate(candidates, benchmark, reviews, X, config) -> Optional[WinePick]:
    """Lowest-cost candidate, lowest wine id winning exact ties."""
    best = None
    for wid in candidates:
        row = X.row_dense(wid)
        distance = float(np.linalg.norm(benchmark - row))
        value = _value_term(reviews[wid], config.quality_over_price)
        cost = value + config.lam * distance
        if best is None or cost < best.cost:
            best = WinePick(wine_id=wid, cost=cost, value_term=value,
                            distance=distance, source_clusters=(), benchmark=None)
    return best


def _eligible_mask(reviews, X: FeatureMatrix, excluded) -> np.ndarray:
    """Candidates must be priced, have nonzero coordinates, and be unseen."""
    mask = np.zeros(len(reviews), dtype=bool)
    for r in reviews:
        mask[r.id] = r.price is not None
    nnz = np.diff(X.indptr) > 0
    mask &= nnz
    for wid in excluded:
        if 0 <= wid < len(mask):
            mask[wid] = False
    return mask


def recommend(history: UserHistory, reviews: list[Review], X: FeatureMatrix,
              gmm: GmmModel, config: RecommenderConfig,
              assignments: Optional[np.ndarray] = None) -> RecommendationSet:
    """Assemble 3 Bets plus 1 Wildcard from the user's history.

    Each slot re-runs the full chain (cluster draw, benchmark draw,
    expansion, cost minimization) on its own seeded stream; the wildcard
    uses the broader noise scale. Wines already in the history, already
    picked, unpriced, or without coordinates are never candidates.
    """
    if assignments is None:
        assignments = gmm_assignments(gmm, X)
    _check_ids(history.ids(), len(reviews))
    pref = cluster_preferences(history, assignments, gmm.k)
    mask = _eligible_mask(reviews, X, history.ids())
    available = int(mask.sum())
    if available < SLOT_COUNT:
        raise InsufficientCandidates(
            f"need {SLOT_COUNT} candidates outside the history, only {available} available")

    picks: list[WinePick] = []
    chosen: set[int] = set()
    scales = [config.noise_scale] * 3 + [config.wildcard_scale]
    for slot, scale in enumerate(scales):
        rng = make_rng(subseed(config.seed, f"slot-{slot}"))
        pick = None
        for _ in range(MAX_SAMPLE_ATTEMPTS):
            cluster = sample_cluster(pref, rng)
            benchmark, source_wine = sample_benchmark(
                cluster, history, X, scale, gmm, rng, assignments=assignments)
            space = expand_search_space(gmm, benchmark, config.expansion_ratio)
            candidates = [wid for wid in range(len(reviews))
                          if mask[wid] and wid not in chosen and assignments[wid] in space]
            if not candidates:
                continue
            pick = _best_candidate(candidates, benchmark, reviews, X, config)
            pick.source_clusters = tuple(sorted(space))
            pick.benchmark = BenchmarkProvenance(
                kind="history", source_id=source_wine, cluster=cluster,
                noise_seed=subseed(config.seed, f"slot-{slot}"))
            pick.benchmark_coord = benchmark
            break
        if pick is None:
            remaining = int(mask.sum()) - len(chosen)
            raise InsufficientCandidates(
                f"no candidate found in {MAX_SAMPLE_ATTEMPTS} sampled search spaces; "
                f"{remaining} wines were available overall")
        picks.append(pick)
        chosen.add(pick.wine_id)
    return RecommendationSet(bets=picks[:3], wildcard=picks[3])


def cold_start_targets(keywords: Sequence[str], keyword_table: list[list[str]],
                       gmm: GmmModel, rng: np.random.Generator):
    """Match keywords against per-cluster keyword lists.

    Every cluster scores one point per keyword it lists; the argmax set
    (ties included) are the targets. The benchmark is the mean of one
    uniformly sampled target. Returns (targets, benchmark, sampled id).
    """
    wanted = [kw.strip().lower() for kw in keywords if kw.strip()]
    if not wanted:
        raise ValueError("keywords must be nonempty")
    scores = np.zeros(len(keyword_table), dtype=np.int64)
    for c, words in enumerate(keyword_table):
        listed = set(words)
        scores[c] = sum(1 for kw in wanted if kw in listed)
    if scores.max() == 0:
        raise NoMatchingPalate("no matching palate")
    targets = [int(c) for c in np.flatnonzero(scores == scores.max())]
    sampled = targets[int(rng.integers(len(targets)))]
    return targets, gmm.means[sampled].copy(), sampled


def recommend_cold_start(keywords: Sequence[str], keyword_table: list[list[str]],
                         reviews: list[Review], X: FeatureMatrix, gmm: GmmModel,
                         config: RecommenderConfig, excluded_ids: Sequence[int] = (),
                         assignments: Optional[np.ndarray] = None) -> RecommendationSet:
    """Keyword-driven Bets + Wildcard for users with no liked history.

    Bets search around a target-cluster centroid directly; the wildcard
    perturbs the centroid with the broad noise scale. ``excluded_ids``
    keeps already-judged wines out of the candidate pool.
    """
    if assignments is None:
        assignments = gmm_assignments(gmm, X)
    mask = _eligible_mask(reviews, X, excluded_ids)
    available = int(mask.sum())
    if available < SLOT_COUNT:
        raise InsufficientCandidates(
            f"need {SLOT_COUNT} candidates, only {available} available")

    picks: list[WinePick] = []
    chosen: set[int] = set()
    for slot in range(SLOT_COUNT):
        seed = subseed(config.seed, f"coldstart-slot-{slot}")
        rng = make_rng(seed)
        pick = None
        for _ in range(MAX_SAMPLE_ATTEMPTS):
            _, benchmark, sampled = cold_start_targets(keywords, keyword_table, gmm, rng)
            if slot == 3:
                sigma = config.wildcard_scale * np.sqrt(gmm.variances[sampled])
                benchmark = np.maximum(benchmark + rng.normal(0.0, 1.0, len(benchmark)) * sigma, 0.0)
            space = expand_search_space(gmm, benchmark, config.expansion_ratio)
            candidates = [wid for wid in range(len(reviews))
                          if mask[wid] and wid not in chosen and assignments[wid] in space]
            if not candidates:
                continue
            pick = _best_candidate(candidates, benchmark, reviews, X, config)
            pick.source_clusters = tuple(sorted(space))
            pick.benchmark = BenchmarkProvenance(
                kind="centroid", source_id=sampled, cluster=sampled, noise_seed=seed)
            pick.benchmark_coord = benchmark
            break
        if pick is None:
            remaining = int(mask.sum()) - len(chosen)
            raise InsufficientCandidates(
                f"no candidate found in {MAX_SAMPLE_ATTEMPTS} sampled search spaces; "
                f"{remaining} wines were available overall")
        picks.append(pick)
        chosen.add(pick.wine_id)
    return RecommendationSet(bets=picks[:3], wildcard=picks[3])


def artificial_history(keywords: Sequence[str], X: FeatureMatrix,
                       vocab: VocabIndex, per_keyword: int = 5) -> UserHistory:
    """Synthesize a liked history from the top TF-IDF wines per keyword.

    Kept as the non-default cold-start alternative; keywords missing
    from the vocabulary are skipped with a warning.
    """
    hist = UserHistory()
    matched = 0
    for kw in keywords:
        term = kw.strip().lower()
        col = vocab.index.get(term)
        if col is None:
            log.warning("keyword %r not in vocabulary; skipped", kw)
            continue
        matched += 1
        pos = np.flatnonzero(X.indices == col)
        if len(pos) == 0:
            continue
        rows = np.searchsorted(X.indptr, pos, side="right") - 1
        vals = X.data[pos]
        order = np.lexsort((rows, -vals))
        for t in order[:per_keyword]:
            wid = int(rows[t])
            if wid not in hist:
                hist.add(wid, LIKED)
    if matched == 0:
        raise ValueError("no keyword found in the vocabulary")
    return hist
