import pytest
from fastapi.testclient import TestClient

from palate.recommend import RecommenderConfig, recommend_cold_start
from palate.seeding import subseed, text_seed
from palate.service import (NoPreferences, SessionStore, UnknownSession,
                            create_app)


@pytest.fixture(scope="module")
def store(bundle200):
    return SessionStore(bundle200)


@pytest.fixture(scope="module")
def client(bundle200):
    return TestClient(create_app(bundle200))


def first_keyword(bundle):
    return bundle.keyword_table[0][0]


# -- store -------------------------------------------------------------------

def test_session_seed_derivation(store, bundle200):
    s = store.create_session()
    assert s.seed == text_seed(f"{bundle200.corpus_digest}:{s.session_id}")
    assert len(s.session_id) == 32
    assert store.get(s.session_id) is s


def test_unknown_session(store):
    with pytest.raises(UnknownSession):
        store.get("deadbeef")


def test_recommendations_before_any_input(store):
    s = store.create_session()
    with pytest.raises(NoPreferences):
        store.get_recommendations(s.session_id)


def test_questionnaire_then_recommend(store, bundle200):
    s = store.create_session()
    store.submit_questionnaire(s.session_id, [first_keyword(bundle200)])
    recs, seed, idx = store.get_recommendations(s.session_id)
    assert idx == 0
    assert seed == subseed(s.seed, "round-0")
    assert len(set(recs.wine_ids())) == 4
    _, seed2, idx2 = store.get_recommendations(s.session_id)
    assert (seed2, idx2) == (subseed(s.seed, "round-1"), 1)


def test_feedback_switches_to_history_path(store, bundle200):
    s = store.create_session()
    store.submit_questionnaire(s.session_id, [first_keyword(bundle200)])
    recs, _, _ = store.get_recommendations(s.session_id)
    ids = recs.wine_ids()
    store.submit_feedback(s.session_id, ids[0], "liked")
    store.submit_feedback(s.session_id, ids[1], "disliked")
    recs2, _, _ = store.get_recommendations(s.session_id)
    assert recs2.picks[0].benchmark.kind == "history"
    assert not set(recs2.wine_ids()) & {ids[0], ids[1]}


def test_feedback_validation(store, bundle200):
    s = store.create_session()
    with pytest.raises(ValueError, match="verdict"):
        store.submit_feedback(s.session_id, 0, "meh")
    with pytest.raises(ValueError, match="wine"):
        store.submit_feedback(s.session_id, 99_999, "liked")


def test_dislikes_only_keeps_cold_path(store, bundle200):
    s = store.create_session()
    store.submit_questionnaire(s.session_id, [first_keyword(bundle200)])
    recs, _, _ = store.get_recommendations(s.session_id)
    for wid in recs.wine_ids():
        store.submit_feedback(s.session_id, wid, "disliked")
    recs2, _, _ = store.get_recommendations(s.session_id)
    assert recs2.picks[0].benchmark.kind == "centroid"
    assert not set(recs2.wine_ids()) & set(recs.wine_ids())


def test_sessions_isolated(store, bundle200):
    a = store.create_session()
    b = store.create_session()
    store.submit_questionnaire(a.session_id, [first_keyword(bundle200)])
    with pytest.raises(NoPreferences):
        store.get_recommendations(b.session_id)


def test_round_replayable_via_library(store, bundle200):
    # the reported round seed must reproduce the same set out of band
    s = store.create_session()
    kw = first_keyword(bundle200)
    store.submit_questionnaire(s.session_id, [kw])
    recs, seed, _ = store.get_recommendations(s.session_id)
    cfg = RecommenderConfig(
        lam=bundle200.config.lam, noise_scale=bundle200.config.noise_scale,
        wildcard_scale=bundle200.config.wildcard_scale,
        expansion_ratio=bundle200.config.expansion_ratio, seed=seed)
    replay = recommend_cold_start([kw], bundle200.keyword_table,
                                  bundle200.reviews, bundle200.X, bundle200.gmm,
                                  cfg, assignments=bundle200.assignments)
    assert replay.wine_ids() == recs.wine_ids()


# -- http --------------------------------------------------------------------

def test_http_session_and_keywords(client):
    r = client.post("/api/session")
    assert r.status_code == 200
    sid = r.json()["session_id"]
    assert isinstance(sid, str) and sid
    kw = client.get("/api/keywords")
    assert kw.status_code == 200
    table = kw.json()["clusters"]
    assert len(table) == 4
    assert all(len(c["keywords"]) == 10 for c in table)


def test_http_full_loop(client):
    sid = client.post("/api/session").json()["session_id"]
    table = client.get("/api/keywords").json()["clusters"]
    picked = table[1]["keywords"][0]
    q = client.post(f"/api/session/{sid}/questionnaire",
                    json={"keywords": [picked]})
    assert q.status_code == 200
    assert q.json()["target_clusters"]
    r1 = client.get(f"/api/session/{sid}/recommendations")
    assert r1.status_code == 200
    body = r1.json()
    assert body["round"] == 0
    assert len(body["bets"]) == 3
    assert isinstance(body["wildcard"]["wine_id"], int)
    card = body["bets"][0]
    for field in ("wine_id", "name", "winery", "price", "score", "cost",
                  "value_term", "distance", "source_clusters", "benchmark"):
        assert field in card
    fb = client.post(f"/api/session/{sid}/feedback",
                     json={"wine_id": card["wine_id"], "verdict": "liked"})
    assert fb.status_code == 200
    assert fb.json()["history_size"] == 1
    r2 = client.get(f"/api/session/{sid}/recommendations")
    assert r2.json()["round"] == 1
    ids2 = [c["wine_id"] for c in r2.json()["bets"] + [r2.json()["wildcard"]]]
    assert card["wine_id"] not in ids2


def test_http_error_bodies(client):
    r = client.get("/api/session/nope/recommendations")
    assert r.status_code == 404
    assert r.json() == {"code": "unknown_session",
                        "message": r.json()["message"]}
    sid = client.post("/api/session").json()["session_id"]
    r = client.get(f"/api/session/{sid}/recommendations")
    assert r.status_code == 409
    assert r.json()["code"] == "no_preferences"
    assert "questionnaire" in r.json()["message"]
    r = client.post(f"/api/session/{sid}/questionnaire", json={"keywords": []})
    assert r.status_code == 400
    assert r.json()["code"] == "invalid_keywords"
    r = client.post(f"/api/session/{sid}/questionnaire",
                    json={"keywords": ["zzznope"]})
    assert r.status_code == 400
    assert r.json()["code"] == "no_matching_palate"


def test_http_feedback_errors(client):
    sid = client.post("/api/session").json()["session_id"]
    r = client.post(f"/api/session/{sid}/feedback",
                    json={"wine_id": 0, "verdict": "sublime"})
    assert r.status_code == 400
    assert r.json()["code"] == "invalid_verdict"
    r = client.post(f"/api/session/{sid}/feedback",
                    json={"wine_id": 123456, "verdict": "liked"})
    assert r.status_code == 400
    assert r.json()["code"] == "unknown_wine"


def test_http_unknown_session_for_posts(client):
    r = client.post("/api/session/nope/feedback",
                    json={"wine_id": 0, "verdict": "liked"})
    assert r.status_code == 404
    assert r.json()["code"] == "unknown_session"
