import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from palate.bundle import build_bundle
from palate.corpus import parse_reviews

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
WINES_200 = FIXTURES / "wines_200.ndjson"


@pytest.fixture(scope="session")
def wines200():
    with open(WINES_200, "rb") as fh:
        reviews, stats = parse_reviews(fh)
    assert stats.retained == 200
    return reviews


@pytest.fixture(scope="session")
def bundle200(wines200):
    # one shared fit: k=4 matches the fixture's four descriptor pools
    return build_bundle(wines200, k=4, seed=2024, min_df=2)
