"""Command-line entry point wiring the whole pipeline.

Subcommands: corpus stats | featurize | cluster fit/elbow/keywords |
embed train | recommend | coldstart | serve. All randomness flows from
--seed; the stages derive labeled sub-seeds so streams stay independent.
Reports print as aligned tables or single JSON records (--output).
"""

import argparse
import json
import logging
import sys

from . import __version__
from .bundle import build_bundle, load_bundle, save_bundle
from .cluster import DEFAULT_ELBOW_KS, centroid_keywords, elbow_scan
from .corpus import parse_reviews
from .embed import build_cooccurrence, train_glove
from .featurize import build_vocabulary, compute_tfidf, default_stopwords, tokenize
from .recommend import (RecommenderConfig, UserHistory, recommend,
                        recommend_cold_start)
from .seeding import subseed

log = logging.getLogger("palate")


def _emit(doc: dict, fmt: str, table_rows=None, columns=None) -> None:
    """Print ``doc`` as one JSON record, or as a table for humans.

    ``table_rows``/``columns`` override the default key: value layout.
    """
    if fmt == "record":
        print(json.dumps(doc, sort_keys=True))
        return
    if table_rows is not None:
        widths = [max(len(str(c)), *(len(str(r[i])) for r in table_rows)) if table_rows
                  else len(str(c)) for i, c in enumerate(columns)]
        print("  ".join(str(c).ljust(w) for c, w in zip(columns, widths)))
        for row in table_rows:
            print("  ".join(str(v).ljust(w) for v, w in zip(row, widths)))
    else:
        width = max(len(k) for k in doc)
        for key, value in doc.items():
            print(f"{key.ljust(width)}  {value}")


def _load_corpus(path: str, threshold: int):
    with open(path, "rb") as fh:
        reviews, stats = parse_reviews(fh, threshold=threshold)
    log.info("corpus %s: %s", path, stats.as_line())
    return reviews, stats


def _fmt(value, digits: int = 6):
    return round(float(value), digits)


def _pick_row(tag: str, pick, reviews):
    r = reviews[pick.wine_id]
    price = f"{r.price:.2f}" if r.price is not None else "NA"
    return [tag, pick.wine_id, r.name, price, r.score, _fmt(pick.cost),
            _fmt(pick.value_term), _fmt(pick.distance),
            ",".join(str(c) for c in pick.source_clusters)]


def _pick_doc(pick, reviews, lam: float) -> dict:
    r = reviews[pick.wine_id]
    return {"wine_id": pick.wine_id, "name": r.name, "winery": r.winery,
            "country": r.country, "region": r.region, "vintage": r.vintage,
            "price": r.price, "score": r.score, "cost": pick.cost,
            "value_term": pick.value_term, "distance": pick.distance,
            "distance_term": lam * pick.distance,
            "source_clusters": list(pick.source_clusters),
            "benchmark": {"kind": pick.benchmark.kind,
                          "source_id": pick.benchmark.source_id,
                          "cluster": pick.benchmark.cluster}}


def _print_recommendations(recs, reviews, config, fmt: str) -> None:
    doc = {"seed": config.seed, "lambda": config.lam,
           "bets": [_pick_doc(p, reviews, config.lam) for p in recs.bets],
           "wildcard": _pick_doc(recs.wildcard, reviews, config.lam)}
    rows = [_pick_row(f"bet {i + 1}", p, reviews) for i, p in enumerate(recs.bets)]
    rows.append(_pick_row("wildcard", recs.wildcard, reviews))
    _emit(doc, fmt, table_rows=rows,
          columns=["slot", "id", "name", "price", "score", "cost", "value", "dist", "clusters"])


def cmd_corpus_stats(args) -> int:
    _, stats = _load_corpus(args.corpus, args.threshold)
    doc = {"total_read": stats.total_read, "rejected_malformed": stats.rejected_malformed,
           "rejected_low_score": stats.rejected_low_score, "retained": stats.retained,
           "threshold": args.threshold}
    if args.output == "table":
        print(stats.as_line())
    else:
        _emit(doc, "record")
    return 0


def cmd_featurize(args) -> int:
    reviews, _ = _load_corpus(args.corpus, args.threshold)
    tokens = [tokenize(r.review_text) for r in reviews]
    vocab = build_vocabulary(tokens, default_stopwords(), min_df=args.min_df)
    X, empty = compute_tfidf(tokens, vocab)
    doc = {"documents": X.n_rows, "vocabulary": len(vocab),
           "nonzero_entries": int(len(X.data)), "empty_rows": len(empty),
           "min_df": args.min_df}
    _emit(doc, args.output)
    return 0


def cmd_cluster_fit(args) -> int:
    reviews, _ = _load_corpus(args.corpus, args.threshold)
    config = RecommenderConfig(lam=args.lam, noise_scale=args.noise_scale,
                               wildcard_scale=args.wildcard_scale,
                               expansion_ratio=args.expansion_ratio, seed=args.seed)
    bundle = build_bundle(reviews, k=args.k, seed=args.seed, config=config,
                          min_df=args.min_df, algorithm=args.algo,
                          restarts=args.restarts, batch_size=args.batch_size,
                          max_iter=args.max_iter)
    save_bundle(bundle, args.bundle)
    log.info("bundle written to %s", args.bundle)
    doc = {"bundle": args.bundle, "k": args.k, "algo": args.algo,
           "documents": bundle.X.n_rows, "vocabulary": len(bundle.vocab),
           "kmeans_sse": _fmt(bundle.kmeans.sse),
           "kmeans_iterations": bundle.kmeans.iterations_run,
           "gmm_log_likelihood": _fmt(bundle.gmm.log_likelihood),
           "gmm_iterations": bundle.gmm.iterations_run,
           "corpus_digest": bundle.corpus_digest}
    _emit(doc, args.output)
    return 0


def cmd_cluster_elbow(args) -> int:
    reviews, _ = _load_corpus(args.corpus, args.threshold)
    tokens = [tokenize(r.review_text) for r in reviews]
    vocab = build_vocabulary(tokens, default_stopwords(), min_df=args.min_df)
    X, _ = compute_tfidf(tokens, vocab)
    ks = [int(v) for v in args.ks.split(",") if v.strip()]
    curve = elbow_scan(X, ks, subseed(args.seed, "elbow"), restarts=args.restarts,
                       rows=X.nonempty_rows())
    doc = {"points": [[k, s] for k, s in curve.points], "chosen_k": curve.chosen_k}
    rows = [[k, _fmt(s)] for k, s in curve.points]
    _emit(doc, args.output, table_rows=rows, columns=["k", "sse"])
    if args.output == "table":
        print(f"chosen_k  {curve.chosen_k}")
    return 0


def cmd_cluster_keywords(args) -> int:
    bundle = load_bundle(args.bundle)
    table = (bundle.keyword_table if args.top == len(bundle.keyword_table[0])
             else centroid_keywords(bundle.gmm, bundle.vocab, args.top))
    doc = {"clusters": [{"cluster_id": c, "keywords": words}
                        for c, words in enumerate(table)]}
    rows = [[c, " ".join(words)] for c, words in enumerate(table)]
    _emit(doc, args.output, table_rows=rows, columns=["cluster", "keywords"])
    return 0


def cmd_embed_train(args) -> int:
    reviews, _ = _load_corpus(args.corpus, args.threshold)
    tokens = [tokenize(r.review_text) for r in reviews]
    vocab = build_vocabulary(tokens, default_stopwords(), min_df=args.min_df)
    cooc = build_cooccurrence(tokens, vocab, window=args.window)
    vectors = train_glove(cooc, dim=args.dim, epochs=args.epochs, rate=args.rate,
                          seed=subseed(args.seed, "embed"))
    doc = {"dim": args.dim, "epochs": args.epochs, "pairs": len(cooc),
           "epoch_losses": vectors.epoch_losses}
    rows = [[e, _fmt(loss)] for e, loss in enumerate(vectors.epoch_losses)]
    _emit(doc, args.output, table_rows=rows, columns=["epoch", "loss"])
    if args.bundle:
        bundle = load_bundle(args.bundle)
        if list(bundle.vocab.terms) != list(vocab.terms):
            print("error: bundle vocabulary does not match this corpus", file=sys.stderr)
            return 1
        bundle.word_vectors = vectors
        save_bundle(bundle, args.bundle)
        log.info("word vectors stored in %s", args.bundle)
    return 0


def _run_recommend(args, require_pref: bool) -> int:
    if not getattr(args, "history", None) and not args.keywords:
        raise UsageError("one of --history or --keywords is required")
    bundle = load_bundle(args.bundle)
    config = RecommenderConfig(lam=args.lam if args.lam is not None else bundle.config.lam,
                               noise_scale=bundle.config.noise_scale,
                               wildcard_scale=bundle.config.wildcard_scale,
                               expansion_ratio=bundle.config.expansion_ratio,
                               seed=args.seed, quality_over_price=args.quality_over_price)
    log.info("recommender config: %s", config)
    if getattr(args, "history", None):
        history = UserHistory.parse_file(args.history)
        recs = recommend(history, bundle.reviews, bundle.X, bundle.gmm, config,
                         assignments=bundle.assignments)
    else:
        keywords = [w.strip() for w in args.keywords.split(",") if w.strip()]
        recs = recommend_cold_start(keywords, bundle.keyword_table, bundle.reviews,
                                    bundle.X, bundle.gmm, config,
                                    assignments=bundle.assignments)
    _print_recommendations(recs, bundle.reviews, config, args.output)
    return 0


def cmd_recommend(args) -> int:
    return _run_recommend(args, require_pref=True)


def cmd_coldstart(args) -> int:
    args.history = None
    return _run_recommend(args, require_pref=True)


def cmd_serve(args) -> int:
    from .service import serve

    bundle = load_bundle(args.bundle)
    serve(bundle, host=args.host, port=args.port, static_dir=args.static)
    return 0


class UsageError(Exception):
    pass


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", choices=("table", "record"), default="table",
                   help="report format: human table or one JSON record")


def _add_corpus(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="NDJSON review file")
    p.add_argument("--threshold", type=int, default=80,
                   help="minimum review score to retain")
    p.add_argument("--min-df", type=int, default=2, dest="min_df",
                   help="minimum document frequency for vocabulary terms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="palate",
                                     description="wine recommendation pipeline")
    parser.add_argument("--version", action="version", version=f"palate {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="corpus inspection")
    corpus_sub = corpus.add_subparsers(dest="subcommand", required=True)
    stats = corpus_sub.add_parser("stats", help="ingestion counts for a corpus file")
    _add_corpus(stats)
    _add_output(stats)
    stats.set_defaults(func=cmd_corpus_stats)

    feat = sub.add_parser("featurize", help="build the TF-IDF design matrix")
    _add_corpus(feat)
    _add_output(feat)
    feat.set_defaults(func=cmd_featurize)

    cluster = sub.add_parser("cluster", help="fit and inspect cluster models")
    cluster_sub = cluster.add_subparsers(dest="subcommand", required=True)

    fit = cluster_sub.add_parser("fit", help="fit models and write a bundle")
    _add_corpus(fit)
    _add_output(fit)
    fit.add_argument("--k", type=int, default=32)
    fit.add_argument("--algo", choices=("kmeans", "minibatch", "gmm"), default="kmeans",
                     help="hard-clustering stage (EM always runs on top)")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--restarts", type=int, default=3)
    fit.add_argument("--batch-size", type=int, default=256, dest="batch_size")
    fit.add_argument("--max-iter", type=int, default=100, dest="max_iter")
    fit.add_argument("--bundle", required=True, help="output bundle path")
    fit.add_argument("--lambda", type=float, default=1.0, dest="lam")
    fit.add_argument("--noise-scale", type=float, default=0.1, dest="noise_scale")
    fit.add_argument("--wildcard-scale", type=float, default=1.0, dest="wildcard_scale")
    fit.add_argument("--expansion-ratio", type=float, default=0.8, dest="expansion_ratio")
    fit.set_defaults(func=cmd_cluster_fit)

    elbow = cluster_sub.add_parser("elbow", help="SSE curve over candidate k values")
    _add_corpus(elbow)
    _add_output(elbow)
    elbow.add_argument("--ks", default=",".join(str(k) for k in DEFAULT_ELBOW_KS))
    elbow.add_argument("--seed", type=int, default=0)
    elbow.add_argument("--restarts", type=int, default=3)
    elbow.set_defaults(func=cmd_cluster_elbow)

    kw = cluster_sub.add_parser("keywords", help="top terms per cluster")
    kw.add_argument("--bundle", required=True)
    kw.add_argument("--top", type=int, default=10)
    _add_output(kw)
    kw.set_defaults(func=cmd_cluster_keywords)

    embed = sub.add_parser("embed", help="word-vector training")
    embed_sub = embed.add_subparsers(dest="subcommand", required=True)
    train = embed_sub.add_parser("train", help="train word vectors on a corpus")
    _add_corpus(train)
    _add_output(train)
    train.add_argument("--dim", type=int, default=50)
    train.add_argument("--epochs", type=int, default=15)
    train.add_argument("--rate", type=float, default=0.05)
    train.add_argument("--window", type=int, default=5)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--bundle", help="existing bundle to store the vectors in")
    train.set_defaults(func=cmd_embed_train)

    rec = sub.add_parser("recommend", help="recommend from a history file or keywords")
    rec.add_argument("--bundle", required=True)
    rec.add_argument("--history", help="file of wine_id,liked|disliked lines")
    rec.add_argument("--keywords", help="comma-separated questionnaire keywords")
    rec.add_argument("--lambda", type=float, default=None, dest="lam",
                     help="similarity weight (defaults to the bundle's)")
    rec.add_argument("--seed", type=int, default=0)
    rec.add_argument("--quality-over-price", action="store_true", dest="quality_over_price",
                     help="use the quality/price value term instead of price/quality")
    _add_output(rec)
    rec.set_defaults(func=cmd_recommend)

    cold = sub.add_parser("coldstart", help="recommend from questionnaire keywords")
    cold.add_argument("--bundle", required=True)
    cold.add_argument("--keywords", required=True)
    cold.add_argument("--lambda", type=float, default=None, dest="lam")
    cold.add_argument("--seed", type=int, default=0)
    cold.add_argument("--quality-over-price", action="store_true", dest="quality_over_price")
    _add_output(cold)
    cold.set_defaults(func=cmd_coldstart)

    srv = sub.add_parser("serve", help="host the recommendation API")
    srv.add_argument("--bundle", required=True)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--static", help="directory of web UI assets to mount at /")
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    seed = getattr(args, "seed", None)
    log.info("command=%s seed=%s", args.command, seed if seed is not None else "n/a")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2 with usage
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
