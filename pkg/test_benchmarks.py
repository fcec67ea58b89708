import numpy as np
import pytest

from anticor.benchmarks import (
    DirichletSampler, ExponentiatedGradient, Universal, bah, best_stock_hindsight, cbal, cbal_star,
    eg, lz_strategy, u_cbal, universal, universal_band,
)
from anticor.engine import portfolios_of, simulate
from anticor.exceptions import ArgumentError, ConvergenceError, DimensionError
from anticor.market import cover_gluss, random_market
from anticor.portfolio import Portfolio
from conftest import make_market


def test_best_stock_in_hindsight():
    x = make_market([[1.0, 2.0, 1.5], [1.0, 0.4, 1.5]])
    b = best_stock_hindsight(x)
    np.testing.assert_array_equal(b.weights, [0, 0, 1])
    assert simulate(bah(b), x).final == pytest.approx(2.25)


def test_best_stock_ties_pick_lowest_index(cg4):
    np.testing.assert_array_equal(best_stock_hindsight(cg4).weights, [1, 0])


def test_bah_holds_initial_portfolio():
    x = make_market([[2.0, 1.0], [2.0, 1.0]])
    bt = simulate(bah([0.5, 0.5]), x)
    # 0.5 * 4 + 0.5 * 1
    assert bt.final == pytest.approx(2.5)


def test_cbal_with_fixed_weights():
    x = make_market([[2.0, 1.0], [2.0, 1.0]])
    assert simulate(cbal([0.5, 0.5]), x).final == pytest.approx(1.5 ** 2)


@pytest.mark.parametrize("k", [1, 10, 100])
def test_cbal_star_on_cover_gluss(k):
    res = cbal_star(cover_gluss(2 * k))
    np.testing.assert_allclose(res.portfolio.weights, [0.5, 0.5], atol=1e-4)
    assert res.total_return == pytest.approx((9 / 8) ** k, rel=1e-8)


def test_cbal_star_beats_best_stock(corpus):
    for x in corpus:
        best = simulate(bah(best_stock_hindsight(x)), x).final
        assert cbal_star(x).total_return >= best * (1 - 1e-8)


def test_cbal_star_picks_dominant_asset():
    x = make_market([[2.0, 1.0]] * 10)
    res = cbal_star(x)
    assert res.total_return == pytest.approx(2.0 ** 10, rel=1e-8)
    assert res.portfolio.weights[0] == pytest.approx(1.0, abs=1e-6)


def test_cbal_star_iteration_cap():
    # optimum at two thirds in the stock, away from the uniform start
    x = make_market([[1.0, 0.5], [1.0, 2.5]] * 3)
    with pytest.raises(ConvergenceError) as err:
        cbal_star(x, max_iter=1)
    assert isinstance(err.value.best, Portfolio)
    assert err.value.objective is not None


def test_cbal_star_interior_optimum():
    res = cbal_star(make_market([[1.0, 0.5], [1.0, 2.5]] * 3))
    np.testing.assert_allclose(res.portfolio.weights, [1 / 3, 2 / 3], atol=1e-4)
    assert res.total_return == pytest.approx((4 / 3) ** 3, rel=1e-8)


def test_cbal_star_optimum_on_simplex_face():
    x = random_market(110, 4, seed=1001)
    res = cbal_star(x)
    assert res.gap < 1e-4
    assert min(res.portfolio.weights) < 1e-3
    best = simulate(bah(best_stock_hindsight(x)), x).final
    assert res.total_return >= best
    assert res.total_return >= simulate(u_cbal(), x).final


def test_cbal_star_rejects_bad_tolerance(cg4):
    with pytest.raises(ArgumentError):
        cbal_star(cg4, tol=0.0)


def test_eg_zero_is_uniform_cbal(corpus):
    for x in corpus:
        assert np.array_equal(portfolios_of(eg(0.0), x), portfolios_of(u_cbal(), x))


def test_eg_update():
    x = make_market([[2.0, 1.0], [1.0, 1.0]])
    b = portfolios_of(ExponentiatedGradient(0.5), x)
    w = np.exp([0.5 * 2 / 1.5, 0.5 * 1 / 1.5])
    np.testing.assert_allclose(b[0], [0.5, 0.5])
    np.testing.assert_allclose(b[1], w / w.sum())


def test_eg_rejects_negative_eta():
    with pytest.raises(ArgumentError):
        eg(-0.1)


def test_dirichlet_sampler_rows_on_simplex():
    s = DirichletSampler(seed=1).sample(4, 100)
    assert s.shape == (100, 4)
    assert np.all(s >= 0)
    np.testing.assert_allclose(s.sum(axis=1), 1.0)


def test_dirichlet_sampler_rejects_bad_alpha():
    with pytest.raises(ArgumentError):
        DirichletSampler(alpha=0.0)


def test_dirichlet_sampler_takes_a_concentration_vector():
    symmetric = DirichletSampler(alpha=0.5, seed=4).sample(3, 50)
    np.testing.assert_array_equal(DirichletSampler(alpha=[0.5, 0.5, 0.5], seed=4).sample(3, 50), symmetric)
    skewed = DirichletSampler(alpha=[50.0, 1.0, 1.0], seed=4).sample(3, 2000)
    assert skewed[:, 0].mean() == pytest.approx(50 / 52, abs=0.01)
    with pytest.raises(DimensionError):
        DirichletSampler(alpha=[0.5, 0.5]).sample(3, 10)
    with pytest.raises(ArgumentError):
        DirichletSampler(alpha=[0.5, -1.0])


def test_universal_is_mean_of_sampled_cbals(corpus):
    for x in corpus[:4]:
        u = Universal(DirichletSampler(seed=3), 200)
        final = simulate(u, x).final
        assert final == pytest.approx(u.sampled_wealth(x).mean(), rel=1e-9)


def test_universal_single_sample_is_a_cbal(corpus):
    x = corpus[0]
    u = Universal(DirichletSampler(seed=9), 1)
    b = DirichletSampler(seed=9).sample(x.n_assets, 1)[0]
    assert simulate(u, x).final == pytest.approx(simulate(cbal(b), x).final, rel=1e-12)


def test_universal_is_seeded(corpus):
    x = corpus[1]
    a = simulate(universal(DirichletSampler(seed=4), 300), x)
    b = simulate(universal(DirichletSampler(seed=4), 300), x)
    c = simulate(universal(DirichletSampler(seed=5), 300), x)
    assert np.array_equal(a.wealth.log_values, b.wealth.log_values)
    assert not np.array_equal(a.portfolios, c.portfolios)


def test_universal_never_beats_cbal_star(corpus):
    for x in corpus:
        u = simulate(universal(DirichletSampler(seed=2), 500), x).final
        assert u <= cbal_star(x).total_return * (1 + 1e-6)


def test_universal_rejects_zero_samples():
    with pytest.raises(ArgumentError):
        universal(n_samples=0)


def test_universal_band(corpus):
    mean, stderr = universal_band(corpus[0], [1, 2, 3], 200)
    assert mean > 0 and stderr >= 0
    single, zero = universal_band(corpus[0], [1], 200)
    assert zero == 0.0


def test_lz_portfolios_stay_on_simplex(corpus):
    for x in corpus:
        b = portfolios_of(lz_strategy(), x)
        assert np.all(b > 0)
        np.testing.assert_allclose(b.sum(axis=1), 1.0)
        np.testing.assert_allclose(b[0], np.full(x.n_assets, 1 / x.n_assets))


@pytest.mark.slow
def test_dominance_on_many_small_markets():
    rng = np.random.default_rng(2003)
    for k in range(200):
        x = random_market(int(rng.integers(1, 251)), int(rng.integers(1, 6)), seed=k)
        best = simulate(bah(best_stock_hindsight(x)), x).final
        star = cbal_star(x).total_return
        assert star >= best * (1 - 1e-8)
        assert simulate(universal(DirichletSampler(seed=k), 200), x).final <= star * (1 + 1e-6)
