"""Regenerate wines_200.ndjson, the committed recommendation fixture.

Deterministic: python3 make_wines.py > wines_200.ndjson
200 retained wines across 4 descriptor archetypes, plus 3 low-score and
2 malformed lines so ingestion counters have something to count.
"""

import json

import numpy as np

POOLS = {
    "red": ["cherry", "plum", "cassis", "violet", "leather", "cedar",
            "tobacco", "currant", "anise", "clove"],
    "white": ["lemon", "lime", "peach", "apricot", "honeysuckle", "flint",
              "grass", "quince", "melon", "blossom"],
    "sparkling": ["brioche", "apple", "chalk", "yeast", "citrus", "almond",
                  "toast", "pear", "ginger", "cream"],
    "dessert": ["honey", "fig", "raisin", "caramel", "orange", "marmalade",
                "walnut", "saffron", "molasses", "date"],
}
FILLER = ["notes", "hints", "flavors", "finish", "palate", "drink", "wine",
          "the", "with", "a", "of", "and", "this", "is", "it"]
COUNTRIES = ["France", "Italy", "Spain", "Portugal", "Germany", "Chile"]
NAME_PARTS = ["Mont", "Val", "Bella", "Terra", "Roca", "Alta", "Casa", "Pic",
              "Fonte", "Sol", "Vigna", "Clos"]


def make_review(rng, pool):
    words = []
    for _ in range(rng.integers(14, 22)):
        if rng.random() < 0.35:
            words.append(FILLER[rng.integers(len(FILLER))])
        else:
            words.append(pool[rng.integers(len(pool))])
    words.append(f"Best from {2012 + rng.integers(8)}.")
    return " ".join(words).capitalize()


def make_record(rng, style, pool, idx):
    vintage = "NV" if rng.random() < 0.05 else str(1998 + int(rng.integers(19)))
    price = "NA" if rng.random() < 0.05 else f"${np.exp(rng.uniform(np.log(8), np.log(150))):.2f}"
    name = (f"{NAME_PARTS[rng.integers(len(NAME_PARTS))]}"
            f"{NAME_PARTS[rng.integers(len(NAME_PARTS))].lower()} "
            f"{style.capitalize()} No. {idx}")
    return {
        "name": name,
        "url": f"https://example.invalid/wine/{idx}",
        "country": COUNTRIES[int(rng.integers(len(COUNTRIES)))],
        "review": make_review(rng, pool),
        "price:": price,
        "score": str(80 + int(rng.integers(20))),
        "winery": f"{NAME_PARTS[rng.integers(len(NAME_PARTS))]} Cellars",
        "vintage": vintage,
        "region": f"Region {int(rng.integers(12))}",
    }


def main():
    rng = np.random.default_rng(20260401)
    lines = []
    idx = 0
    for style, pool in POOLS.items():
        for _ in range(50):
            lines.append(json.dumps(make_record(rng, style, pool, idx)))
            idx += 1
    # low-score rejects
    for _ in range(3):
        rec = make_record(rng, "red", POOLS["red"], idx)
        rec["score"] = str(70 + int(rng.integers(10)))
        lines.append(json.dumps(rec))
        idx += 1
    # malformed: bad JSON and a missing key
    lines.append('{"name": "truncated record"')
    bad = make_record(rng, "white", POOLS["white"], idx)
    del bad["winery"]
    lines.append(json.dumps(bad))
    order = rng.permutation(len(lines))
    for i in order:
        print(lines[i])


if __name__ == "__main__":
    main()
