"""Regression checks against the historical NYSE and DJIA daily series.

Skipped unless ANTICOR_NYSE_CSV / ANTICOR_DJIA_CSV name local copies
(see README for the expected layout).
"""
import pytest

from anticor.benchmarks import bah, best_stock_hindsight, cbal_star, universal_band
from anticor.constants import BAND_SEEDS, DEFAULT_SAMPLES
from anticor.engine import simulate
from anticor.metrics import report_from_wealth
from backtest import RunSpec, run, sweep_window, validated


def _final(strategy, x, **params):
    return run(validated(RunSpec, strategy=strategy, params=params), x).final


@pytest.mark.parametrize("strategy, expected, rel", [
    ("u-bah", 14.49, 0.005),
    ("best-stock", 54.14, 0.005),
    ("u-cbal", 27.07, 0.005),
    ("eg", 27.08, 0.005),
])
def test_nyse_benchmarks(nyse, strategy, expected, rel):
    assert _final(strategy, nyse) == pytest.approx(expected, rel=rel)


def test_nyse_cbal_star(nyse):
    assert cbal_star(nyse).total_return == pytest.approx(250.59, rel=0.01)


def test_nyse_universal_band(nyse):
    mean, _ = universal_band(nyse, list(range(1, BAND_SEEDS + 1)), DEFAULT_SAMPLES)
    assert mean == pytest.approx(26.99, rel=0.02)


def test_nyse_anti1(nyse):
    assert _final("anti1", nyse) == pytest.approx(17_059_811.56, rel=0.10)


@pytest.mark.slow
def test_nyse_anti2(nyse):
    assert _final("anti2", nyse) == pytest.approx(238_820_058.10, rel=0.20)


def test_nyse_every_window_beats_the_market(nyse):
    res = sweep_window(nyse, range(2, 31), max_workers=4)
    market = res.series["market"][0]
    assert all(v > market for v in res.series["anticor"])


def test_djia_best_stock_metrics(djia):
    r = report_from_wealth(simulate(bah(best_stock_hindsight(djia)), djia).wealth)
    assert r.annualized_return == pytest.approx(0.08, abs=0.02)
    assert r.annualized_risk == pytest.approx(0.42, abs=0.02)
    assert r.sharpe == pytest.approx(0.11, abs=0.02)
