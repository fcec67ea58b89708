# engine.py
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from anticor.base import Strategy, normalize, uniform
from anticor.exceptions import DimensionError
from anticor.market import MarketSequence
from anticor.portfolio import WealthSeries, drift_weights, wealth_series


@dataclass(frozen=True)
class Backtest:
    name: str
    portfolios: np.ndarray        # n x m, row t is the target for day t+1
    wealth: WealthSeries
    gamma: float = 0.0

    @property
    def final(self) -> float:
        return self.wealth.final


def portfolios_of(strategy: Strategy, x: MarketSequence) -> np.ndarray:
    """Run `strategy` online over `x` and return its portfolio sequence.

    Day t's decision sees x[:t] only; the slice is a read-only view so a
    strategy cannot peek at or alter later days.
    """
    n, m = x.relatives.shape
    strategy.reset(m)
    out = np.empty((n, m))
    b_hat = uniform(m)
    for t in range(n):
        b = np.asarray(strategy.next_portfolio(t, x.relatives[:t], b_hat), dtype=float)
        if b.shape != (m,):
            raise DimensionError(f"{strategy.name} returned a portfolio of shape {b.shape} for {m} assets",
                                 strategy=strategy.name)
        b = normalize(b)
        out[t] = b
        b_hat = drift_weights(b, x.relatives[t])
    return out


def simulate(strategy: Strategy, x: MarketSequence, gamma: float = 0.0) -> Backtest:
    portfolios = portfolios_of(strategy, x)
    wealth = wealth_series(portfolios, x, gamma)
    logging.debug("[Engine] %s on %d days → %.6g", strategy.name, x.n_days, wealth.final)
    return Backtest(strategy.name, portfolios, wealth, gamma)
