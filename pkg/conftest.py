import os
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

from anticor.market import MarketSequence, PriceSeries, cover_gluss, load_prices, random_market, to_relatives


def make_market(rows, names=None):
    rows = np.asarray(rows, dtype=float)
    names = names or tuple(f"s{j + 1}" for j in range(rows.shape[1]))
    return MarketSequence(tuple(names), rows)


@pytest.fixture
def cg4():
    return cover_gluss(4)


@pytest.fixture
def flat_market():
    """Three assets that never move."""
    return make_market(np.ones((40, 3)))


@pytest.fixture
def zigzag():
    """Two assets swapping leadership every day, so lagged correlation is negative."""
    up, down = 1.05, 1 / 1.05
    return make_market([[up, down] if t % 2 == 0 else [down, up] for t in range(60)])


@pytest.fixture(scope="session")
def corpus():
    """Seeded small random markets: m ≤ 5, n ≤ 120, relatives in [0.5, 2]."""
    rng = np.random.default_rng(7)
    markets = []
    for k in range(12):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(20, 121))
        markets.append(random_market(n, m, seed=1000 + k))
    return markets


@pytest.fixture(scope="session")
def nyse():
    path = os.getenv("ANTICOR_NYSE_CSV")
    if not path or not Path(path).is_file():
        pytest.skip("ANTICOR_NYSE_CSV not set")
    return _dataset(path, os.getenv("ANTICOR_NYSE_FORMAT", "csv-relatives"))


@pytest.fixture(scope="session")
def djia():
    path = os.getenv("ANTICOR_DJIA_CSV")
    if not path or not Path(path).is_file():
        pytest.skip("ANTICOR_DJIA_CSV not set")
    return _dataset(path, os.getenv("ANTICOR_DJIA_FORMAT", "csv-relatives"))


def _dataset(path, format):
    with open(path, "rb") as fh:
        data = load_prices(fh, format)
    return to_relatives(data) if isinstance(data, PriceSeries) else data


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-length meta-strategy runs on historical data")
