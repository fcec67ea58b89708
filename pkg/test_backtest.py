import numpy as np
import pytest
from pydantic import ValidationError

from anticor.algorithm import Anticor
from anticor.base import Strategy
from anticor.benchmarks import DirichletSampler, eg, lz_strategy, u_bah, u_cbal, universal
from anticor.constants import COMMISSION_SWEEP
from anticor.engine import portfolios_of, simulate
from anticor.exceptions import ArgumentError, DimensionError
from anticor.market import cover_gluss, reverse_market
from anticor.meta import anti1
from anticor.portfolio import commission_return
from backtest import (
    STRATEGIES, RunSpec, SweepResult, audit_causality, metrics_table, run, run_table,
    sweep_commission, sweep_max_window, sweep_window, validated,
)
from conftest import make_market


def spec(strategy, **kw):
    return validated(RunSpec, strategy=strategy, **kw)


# ---------------------------------------------------------------------- #
# RunSpec / run
# ---------------------------------------------------------------------- #

@pytest.mark.parametrize("gamma", [-0.01, 1.0])
def test_gamma_must_be_a_fraction(gamma):
    with pytest.raises(ArgumentError):
        spec("u-bah", gamma=gamma)


def test_unknown_strategy():
    with pytest.raises(ArgumentError):
        spec("martingale")


def test_anticor_needs_a_window():
    with pytest.raises(ArgumentError):
        spec("anticor")
    with pytest.raises(ArgumentError):
        spec("anticor", params={"w": 1})


def test_fixed_weight_strategies_need_weights():
    with pytest.raises(ArgumentError):
        spec("cbal")


def test_validation_error_is_kept_for_direct_use():
    with pytest.raises(ValidationError):
        RunSpec(strategy="u-bah", gamma=2.0)


def test_run_u_bah_on_cover_gluss():
    res = run(spec("u-bah"), cover_gluss(20))
    assert res.final == pytest.approx(1.0, rel=1e-12)
    assert res.report is not None
    assert res.report.n_days == 20


@pytest.mark.parametrize("k", [1, 5, 2000])
def test_run_u_cbal_closed_form(k):
    res = run(spec("u-cbal"), cover_gluss(2 * k))
    assert res.final == pytest.approx((9 / 8) ** k, rel=1e-9)


def test_run_one_day_has_no_metrics():
    res = run(spec("u-bah"), make_market([[1.0, 2.0]]))
    assert res.report is None
    assert res.final == pytest.approx(1.5)


def test_run_reports_rebalancing_turnover(cg4):
    assert run(spec("u-bah"), cg4).turnover == pytest.approx(0.0, abs=1e-12)
    # the uniform CBAL moves a third of its wealth back every day
    assert run(spec("u-cbal"), cg4).turnover == pytest.approx(1 / 3, rel=1e-12)
    assert run(spec("u-cbal"), make_market([[1.0, 2.0]])).turnover == 0.0


def test_run_weights_dimension_mismatch(cg4):
    with pytest.raises(DimensionError):
        run(spec("cbal", params={"weights": [0.2, 0.3, 0.5]}), cg4)


def test_every_strategy_runs(corpus):
    x = corpus[0]
    for sid in STRATEGIES:
        params = {"w": 3, "W": 4, "n_samples": 100, "weights": [1.0] * x.n_assets}
        res = run(spec(sid, params=params), x)
        assert res.final > 0
        np.testing.assert_allclose(res.portfolios.sum(axis=1), 1.0, atol=1e-12)


def test_run_is_deterministic(corpus):
    x = corpus[1]
    a = run(spec("universal", params={"n_samples": 300}, seed=11), x)
    b = run(spec("universal", params={"n_samples": 300}, seed=11), x)
    assert np.array_equal(a.wealth.log_values, b.wealth.log_values)


def test_run_wealth_matches_commission_return(corpus):
    for x in corpus[:4]:
        res = run(spec("anticor", params={"w": 3}, gamma=0.002), x)
        assert res.final == pytest.approx(commission_return(res.portfolios, x, 0.002), rel=1e-10)


@pytest.mark.parametrize("factory", [u_bah, u_cbal, lz_strategy, lambda: eg(0.05), lambda: Anticor(3),
                                     lambda: universal(DirichletSampler(seed=1), 50)])
def test_online_strategies_do_not_look_ahead(corpus, factory):
    for x in corpus[:4]:
        assert audit_causality(factory, x)


class PeekAhead(Strategy):
    """Buys tomorrow's winner by reading past the end of its history view."""
    name = 'peek'

    def next_portfolio(self, t, history, b_hat):
        full = history.base if history.base is not None else history
        b = np.full(self.m, 1.0 / self.m)
        if full.shape[0] > t:
            b = np.zeros(self.m)
            b[int(np.argmax(full[t]))] = 1.0
        return b


def test_audit_catches_lookahead(zigzag):
    assert simulate(PeekAhead(), zigzag).final > 10
    assert not audit_causality(PeekAhead, zigzag)


# ---------------------------------------------------------------------- #
# Sweeps
# ---------------------------------------------------------------------- #

def test_sweep_window_on_flat_market(flat_market):
    res = sweep_window(flat_market, range(2, 8))
    assert res.axis == "w"
    assert res.values == [2, 3, 4, 5, 6, 7]
    for name in ("anticor", "market", "best-stock"):
        assert res.series[name] == [1.0] * 6


def test_window_axes_stay_integral(corpus):
    x = corpus[3]
    for res in (sweep_window(x, range(2, 4)), sweep_max_window(x, np.arange(2, 4))):
        assert res.values == [2, 3]
        assert all(type(v) is int for v in res.values)
    gammas = sweep_commission(x, [0.0, 0.005], params={"W": 3}).values
    assert all(type(g) is float for g in gammas)


def test_sweep_window_is_independent_of_workers(corpus):
    x = corpus[4]
    a = sweep_window(x, range(2, 7), max_workers=1)
    b = sweep_window(x, range(2, 7), max_workers=3)
    assert a.series == b.series


def test_sweep_window_matches_single_runs(corpus):
    x = corpus[5]
    res = sweep_window(x, [2, 4])
    assert res.series["anticor"] == [simulate(Anticor(2), x).final, simulate(Anticor(4), x).final]
    assert res.series["bah-anticor"][0] == pytest.approx(np.mean(res.series["anticor"]))


def test_sweep_max_window_matches_flattened_runs(corpus):
    x = corpus[6]
    res = sweep_max_window(x, [2, 4, 6])
    for W, value in zip(res.values, res.series["anti1"]):
        assert value == pytest.approx(simulate(anti1(W), x).final, rel=1e-9)


def test_sweep_max_window_with_commission(corpus):
    x = corpus[6]
    res = sweep_max_window(x, [3, 5], gamma=0.001, max_workers=2)
    assert res.series["anti1"][1] == pytest.approx(simulate(anti1(5), x, 0.001).final, rel=1e-12)


def test_sweep_commission_endpoint_is_commission_free(corpus):
    x = corpus[7]
    res = sweep_commission(x, COMMISSION_SWEEP, strategy="anti1", params={"W": 4})
    assert res.values[0] == 0.0
    assert res.series["anti1"][0] == simulate(anti1(4), x).final
    ys = res.series["anti1"]
    assert all(a >= b for a, b in zip(ys, ys[1:]))
    assert res.series["market"][0] == pytest.approx(simulate(u_bah(), x).final)


def test_sweep_commission_uses_strategy_params(corpus):
    x = corpus[7]
    res = sweep_commission(x, [0.0, 0.002], strategy="anticor", params={"w": 3})
    assert res.series["anticor"][0] == simulate(Anticor(3), x).final
    slow = sweep_commission(x, [0.0], strategy="eg", params={"eta": 0.0})
    fast = sweep_commission(x, [0.0], strategy="eg", params={"eta": 0.5})
    assert slow.series["eg"][0] == simulate(u_cbal(), x).final
    assert fast.series["eg"][0] != slow.series["eg"][0]


def test_sweep_ranges_are_checked(corpus):
    x = corpus[0]
    with pytest.raises(ArgumentError):
        sweep_window(x, [])
    with pytest.raises(ArgumentError):
        sweep_window(x, [4, 3])
    with pytest.raises(ArgumentError):
        sweep_window(x, [1, 2])
    with pytest.raises(ArgumentError):
        sweep_commission(x, [0.0, 1.0])


def test_sweep_result_axis_must_increase():
    with pytest.raises(ValidationError):
        SweepResult(axis="w", values=[2, 2], series={"anticor": [1.0, 1.0]})
    with pytest.raises(ValidationError):
        SweepResult(axis="w", values=[2, 3], series={"anticor": [1.0]})


# ---------------------------------------------------------------------- #
# Tables
# ---------------------------------------------------------------------- #

def test_run_table_on_cover_gluss(cg4):
    table = run_table({"cg": cg4}, ["u-bah", "u-cbal", "best-stock", "cbal-star"], with_reversed=True)
    assert table.columns == ["cg", "cg^-1"]
    assert table.cells["u-bah"]["cg"] == pytest.approx(1.0)
    assert table.cells["u-cbal"]["cg"] == pytest.approx((9 / 8) ** 2)
    assert table.cells["cbal-star"]["cg"] == pytest.approx((9 / 8) ** 2, rel=1e-8)
    assert table.meta["seed"] == str(RunSpec(strategy="u-bah").seed)


def test_reversed_column_is_recomputed(corpus):
    x = corpus[2]
    table = run_table({"m": x}, ["u-bah"], with_reversed=True)
    rev = reverse_market(x)
    assert table.cells["u-bah"]["m^-1"] == pytest.approx(simulate(u_bah(), rev).final, rel=1e-12)


def test_run_table_universal_band(corpus):
    table = run_table({"m": corpus[0]}, ["universal"], params={"n_samples": 100}, band_seeds=3)
    assert table.errors["universal"]["m"] >= 0
    assert "seeds" in table.meta


def test_run_table_is_independent_of_workers(corpus):
    markets = {"a": corpus[0], "b": corpus[1]}
    ids = ["u-bah", "anticor", "eg"]
    a = run_table(markets, ids, params={"w": 3}, max_workers=1)
    b = run_table(markets, ids, params={"w": 3}, max_workers=4)
    assert a.cells == b.cells


def test_metrics_table(corpus):
    table = metrics_table({"m": corpus[0]}, ["u-bah", "u-cbal"])
    assert table.kind == "metrics"
    rep = table.reports["u-cbal"]["m"]
    assert rep.n_days == corpus[0].n_days
    assert rep.total_return == pytest.approx(table.cells["u-cbal"]["m"])


def test_portfolios_are_recorded(cg4):
    res = run(spec("u-cbal"), cg4)
    assert np.array_equal(res.portfolios, portfolios_of(u_cbal(), cg4))
