"""Session-based recommendation API over a loaded model bundle.

The bundle is immutable and shared; sessions live in memory, each with
its own lock and a seed derived from (bundle digest, session id). Every
recommendation response reports the per-round seed so the exact set can
be replayed offline.
"""

import logging
import secrets
import threading
from dataclasses import dataclass, field
from typing import Optional

from .bundle import ModelBundle, config_with_seed
from .recommend import (DISLIKED, LIKED, ColdStartRequired, InsufficientCandidates,
                        NoMatchingPalate, RecommendationSet, UserHistory,
                        cold_start_targets, recommend, recommend_cold_start)
from .seeding import make_rng, subseed, text_seed

log = logging.getLogger(__name__)


class UnknownSession(KeyError):
    pass


class NoPreferences(ValueError):
    """Session has neither questionnaire keywords nor a liked wine."""


@dataclass
class Session:
    session_id: str
    seed: int
    history: UserHistory = field(default_factory=UserHistory)
    keywords: Optional[list[str]] = None
    target_clusters: Optional[list[int]] = None
    last_recommendations: Optional[RecommendationSet] = None
    rounds_served: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """All session operations; the HTTP layer is a thin adapter over this."""

    def __init__(self, bundle: ModelBundle):
        self.bundle = bundle
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()

    def create_session(self) -> Session:
        sid = secrets.token_hex(16)
        session = Session(session_id=sid,
                          seed=text_seed(f"{self.bundle.corpus_digest}:{sid}"))
        with self._registry_lock:
            self._sessions[sid] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSession(session_id) from None

    def keyword_clusters(self) -> list[dict]:
        return [{"cluster_id": c, "keywords": words}
                for c, words in enumerate(self.bundle.keyword_table)]

    def submit_questionnaire(self, session_id: str, keywords: list[str]) -> list[int]:
        session = self.get(session_id)
        with session.lock:
            # target set is deterministic; the rng draw inside only picks
            # the benchmark, which is re-sampled at recommendation time
            targets, _, _ = cold_start_targets(keywords, self.bundle.keyword_table,
                                               self.bundle.gmm, make_rng(0))
            session.keywords = list(keywords)
            session.target_clusters = targets
            return targets

    def get_recommendations(self, session_id: str):
        """Produce the session's next recommendation round.

        Returns (RecommendationSet, round seed, round index). Each call
        advances the round counter, so repeat calls draw fresh sets while
        staying replayable from the session seed.
        """
        session = self.get(session_id)
        b = self.bundle
        with session.lock:
            round_index = session.rounds_served
            round_seed = subseed(session.seed, f"round-{round_index}")
            config = config_with_seed(b, round_seed)
            if session.history.liked_ids():
                recs = recommend(session.history, b.reviews, b.X, b.gmm,
                                 config, assignments=b.assignments)
            elif session.keywords:
                recs = recommend_cold_start(session.keywords, b.keyword_table,
                                            b.reviews, b.X, b.gmm, config,
                                            excluded_ids=session.history.ids(),
                                            assignments=b.assignments)
            else:
                raise NoPreferences("answer questionnaire or submit feedback first")
            session.rounds_served += 1
            session.last_recommendations = recs
            return recs, round_seed, round_index

    def submit_feedback(self, session_id: str, wine_id: int, verdict: str) -> int:
        session = self.get(session_id)
        if not isinstance(wine_id, int) or not 0 <= wine_id < len(self.bundle.reviews):
            raise ValueError(f"unknown wine id {wine_id}")
        if verdict not in (LIKED, DISLIKED):
            raise ValueError(f"verdict must be '{LIKED}' or '{DISLIKED}'")
        with session.lock:
            session.history.add(wine_id, verdict)
            return len(session.history)


def _pick_payload(pick, reviews, lam: float) -> dict:
    r = reviews[pick.wine_id]
    return {
        "wine_id": pick.wine_id,
        "name": r.name,
        "winery": r.winery,
        "country": r.country,
        "region": r.region,
        "vintage": r.vintage,
        "price": r.price,
        "score": r.score,
        "cost": pick.cost,
        "value_term": pick.value_term,
        "distance": pick.distance,
        "distance_term": lam * pick.distance,
        "source_clusters": list(pick.source_clusters),
        "benchmark": {"kind": pick.benchmark.kind,
                      "source_id": pick.benchmark.source_id,
                      "cluster": pick.benchmark.cluster},
    }


def recommendation_payload(recs: RecommendationSet, reviews, lam: float,
                           seed: int, round_index: int) -> dict:
    return {"bets": [_pick_payload(p, reviews, lam) for p in recs.bets],
            "wildcard": _pick_payload(recs.wildcard, reviews, lam),
            "seed": seed,
            "round": round_index}


def create_app(bundle: ModelBundle, static_dir: Optional[str] = None):
    """Build the FastAPI app for a loaded bundle."""
    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse

    app = FastAPI(title="palate", docs_url=None, redoc_url=None)
    store = SessionStore(bundle)
    app.state.store = store

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status,
                            content={"code": code, "message": message})

    @app.exception_handler(UnknownSession)
    def _unknown_session(request: Request, exc: UnknownSession):
        return error(404, "unknown_session", f"no session {exc.args[0]}")

    @app.exception_handler(NoPreferences)
    def _no_preferences(request: Request, exc: NoPreferences):
        return error(409, "no_preferences", str(exc))

    @app.exception_handler(ColdStartRequired)
    def _cold_start(request: Request, exc: ColdStartRequired):
        return error(409, "no_preferences", "answer questionnaire or submit feedback first")

    @app.exception_handler(NoMatchingPalate)
    def _no_palate(request: Request, exc: NoMatchingPalate):
        return error(400, "no_matching_palate", str(exc))

    @app.exception_handler(InsufficientCandidates)
    def _no_candidates(request: Request, exc: InsufficientCandidates):
        return error(409, "insufficient_candidates", str(exc))

    @app.post("/api/session")
    def create_session():
        session = store.create_session()
        return {"session_id": session.session_id}

    @app.get("/api/keywords")
    def keywords():
        return {"clusters": store.keyword_clusters()}

    @app.post("/api/session/{session_id}/questionnaire")
    def questionnaire(session_id: str, body: dict):
        words = body.get("keywords")
        if not isinstance(words, list) or not words or \
                not all(isinstance(w, str) for w in words):
            return error(400, "invalid_keywords", "keywords must be a nonempty string list")
        targets = store.submit_questionnaire(session_id, words)
        return {"target_clusters": targets}

    @app.get("/api/session/{session_id}/recommendations")
    def recommendations(session_id: str):
        recs, seed, round_index = store.get_recommendations(session_id)
        return recommendation_payload(recs, bundle.reviews, bundle.config.lam,
                                      seed, round_index)

    @app.post("/api/session/{session_id}/feedback")
    def feedback(session_id: str, body: dict):
        wine_id = body.get("wine_id")
        verdict = body.get("verdict")
        if not isinstance(wine_id, int) or isinstance(wine_id, bool):
            return error(400, "unknown_wine", "wine_id must be an integer")
        try:
            size = store.submit_feedback(session_id, wine_id, verdict)
        except UnknownSession:
            raise
        except ValueError as exc:
            code = "unknown_wine" if "wine id" in str(exc) else "invalid_verdict"
            return error(400, code, str(exc))
        return {"history_size": size}

    if static_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


def serve(bundle: ModelBundle, host: str = "127.0.0.1", port: int = 8000,
          static_dir: Optional[str] = None) -> None:
    import uvicorn

    app = create_app(bundle, static_dir=static_dir)
    log.info("serving bundle %s on %s:%d", bundle.corpus_digest[:12], host, port)
    uvicorn.run(app, host=host, port=port, log_level="warning")
