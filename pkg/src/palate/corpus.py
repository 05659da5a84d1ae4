"""Review ingestion: NDJSON parsing, field normalization, quality filter.

Input is newline-delimited JSON, one flat record per line with keys
name, url, country, review, price, score, winery, vintage, region
(url is accepted and ignored; a stray trailing colon in a key, as seen
in scraped data, is tolerated). Scores below the quality threshold and
records that violate the schema are counted separately and skipped,
never silently dropped.
"""

import json
import logging
import re
from dataclasses import dataclass
from typing import IO, Iterable, Optional

log = logging.getLogger(__name__)

QUALITY_THRESHOLD = 80
SCORE_MIN, SCORE_MAX = 50, 100

_REQUIRED_KEYS = frozenset(
    {"name", "country", "review", "price", "score", "winery", "vintage", "region"})
_ALLOWED_KEYS = _REQUIRED_KEYS | {"url"}
_PRICE_RE = re.compile(r"^[-+]?\d+(\.\d+)?$")


@dataclass
class Review:
    """One wine record; id is the row index into the design matrix."""
    id: int
    name: str
    winery: str
    country: str
    region: str
    vintage: Optional[int]
    price: Optional[float]  # whole-currency units, 2-decimal precision
    score: int              # sommelier points, 50..100
    review_text: str


@dataclass
class CorpusStats:
    total_read: int = 0
    rejected_malformed: int = 0
    rejected_low_score: int = 0
    retained: int = 0

    def as_line(self) -> str:
        return ("total_read=%d rejected_malformed=%d rejected_low_score=%d retained=%d"
                % (self.total_read, self.rejected_malformed,
                   self.rejected_low_score, self.retained))


def parse_price(raw) -> Optional[float]:
    """Normalize a price field like "$65" or "$1,250.50"; None if unusable."""
    if raw is None:
        return None
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        value = float(raw)
    else:
        text = str(raw).strip().lstrip("$€£").replace(",", "").strip()
        if not _PRICE_RE.match(text):
            return None
        value = float(text)
    if value <= 0:
        return None
    return round(value, 2)


def _parse_score(raw) -> Optional[int]:
    # WineSpectator scores are integer points; anything else is malformed.
    if isinstance(raw, bool):
        return None
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str) and re.match(r"^\s*\d+\s*$", raw):
        return int(raw)
    return None


def _parse_vintage(raw) -> Optional[int]:
    # "NV" and other non-numeric vintages are metadata gaps, not errors.
    if isinstance(raw, int) and not isinstance(raw, bool):
        return raw
    if isinstance(raw, str) and re.match(r"^\s*\d+\s*$", raw):
        return int(raw)
    return None


class MalformedRecord(ValueError):
    pass


def _record_to_fields(obj) -> dict:
    if not isinstance(obj, dict):
        raise MalformedRecord("record is not an object")
    fields = {key.rstrip(":"): value for key, value in obj.items()}
    keys = set(fields)
    if not keys <= _ALLOWED_KEYS:
        raise MalformedRecord(f"unexpected keys: {sorted(keys - _ALLOWED_KEYS)}")
    if not _REQUIRED_KEYS <= keys:
        raise MalformedRecord(f"missing keys: {sorted(_REQUIRED_KEYS - keys)}")
    return fields


def parse_reviews(source: Iterable[bytes] | IO[bytes],
                  threshold: int = QUALITY_THRESHOLD) -> tuple[list[Review], CorpusStats]:
    """Parse an NDJSON byte stream into retained Reviews plus counts.

    Retained records keep input order and get sequential 0-based ids.
    Malformed records (bad JSON, schema violations, invalid scores) and
    records scoring under ``threshold`` are counted and skipped.
    """
    stats = CorpusStats()
    reviews: list[Review] = []
    for lineno, raw_line in enumerate(source, start=1):
        line = raw_line.decode("utf-8") if isinstance(raw_line, bytes) else raw_line
        if not line.strip():
            continue
        stats.total_read += 1
        try:
            fields = _record_to_fields(json.loads(line))
            score = _parse_score(fields["score"])
            if score is None:
                raise MalformedRecord(f"non-integer score {fields['score']!r}")
            if not SCORE_MIN <= score <= SCORE_MAX:
                raise MalformedRecord(f"score {score} outside {SCORE_MIN}..{SCORE_MAX}")
        except (json.JSONDecodeError, MalformedRecord) as exc:
            stats.rejected_malformed += 1
            log.warning("line %d: rejected malformed record: %s", lineno, exc)
            continue
        if score < threshold:
            stats.rejected_low_score += 1
            continue
        reviews.append(Review(
            id=len(reviews),
            name=str(fields["name"]),
            winery=str(fields["winery"]),
            country=str(fields["country"]),
            region=str(fields["region"]),
            vintage=_parse_vintage(fields["vintage"]),
            price=parse_price(fields["price"]),
            score=score,
            review_text=str(fields["review"]),
        ))
        stats.retained += 1
    return reviews, stats


def filter_quality(reviews: list[Review], threshold: int = QUALITY_THRESHOLD) -> list[Review]:
    """Keep reviews scoring at or above ``threshold``, in stable order."""
    return [r for r in reviews if r.score >= threshold]


def review_to_record(review: Review) -> dict:
    """Ingestion-format record for a Review; parse_reviews round-trips it."""
    return {
        "name": review.name,
        "country": review.country,
        "review": review.review_text,
        "price": f"${review.price:.2f}" if review.price is not None else "NA",
        "score": str(review.score),
        "winery": review.winery,
        "vintage": str(review.vintage) if review.vintage is not None else "NV",
        "region": review.region,
    }


def serialize_reviews(reviews: list[Review]) -> bytes:
    """Canonical NDJSON bytes for a review list (also the digest input)."""
    lines = [json.dumps(review_to_record(r), sort_keys=True, ensure_ascii=False)
             for r in reviews]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
