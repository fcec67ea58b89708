# meta.py – strategies as assets: BAH_W(ANTICOR) and ANTICOR(ANTICOR) compounding
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import List, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from anticor.algorithm import Anticor
from anticor.base import Strategy, normalize, uniform
from anticor.constants import DEFAULT_MAX_WINDOW, MIN_WINDOW
from anticor.engine import portfolios_of
from anticor.exceptions import ArgumentError, DimensionError
from anticor.market import MarketSequence
from anticor.portfolio import WealthSeries, commission_factors, drift_weights


def strategy_as_asset(s: Strategy, x: MarketSequence) -> np.ndarray:
    """Daily wealth ratios of `s` run on `x` without commissions."""
    return commission_factors(portfolios_of(s, x), x, 0.0)


def meta_market(strategies: Sequence[Strategy], x: MarketSequence, max_workers: int = 1) -> MarketSequence:
    """Derived market whose asset k moves with strategy k's wealth."""
    if not strategies:
        raise ArgumentError("meta-market needs at least one strategy")
    columns = _run_all(strategies, x, max_workers)
    return MarketSequence(tuple(s.name for s in strategies), np.column_stack(columns), x.day_labels)


def bah_over(strategies: Sequence[Strategy], x: MarketSequence, max_workers: int = 1) -> WealthSeries:
    """Uniform buy-and-hold over a family: wealth(t) = (1/K) Σ_k wealth_k(t)."""
    if not strategies:
        raise ArgumentError("buy-and-hold over strategies needs at least one strategy")
    log_w = np.array([WealthSeries.from_factors(r).log_values for r in _run_all(strategies, x, max_workers)])
    combined = logsumexp(log_w, axis=0) - np.log(len(strategies))
    combined[0] = 0.0
    return WealthSeries(combined)


def anticor_over(W: int, base: Union[MarketSequence, None] = None) -> List[Strategy]:
    """Handles for ANTICOR_w, w = 2..W."""
    if W < MIN_WINDOW:
        raise ArgumentError(f"max window must be >= {MIN_WINDOW}, got {W}", max_window=W)
    if base is not None and base.n_assets < 2:
        raise DimensionError(f"ANTICOR needs at least 2 assets, got {base.n_assets}")
    return [Anticor(w) for w in range(MIN_WINDOW, W + 1)]


def _run_all(strategies, x, max_workers):
    if max_workers <= 1:
        return [strategy_as_asset(s, x) for s in strategies]
    results = {}
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        fut = {pool.submit(strategy_as_asset, s, x): k for k, s in enumerate(strategies)}
        for f in as_completed(fut):
            results[fut[f]] = f.result()
    return [results[k] for k in range(len(strategies))]


class Family(object):
    """
    A set of strategies stepped in lockstep over one market stream.

    Keeps, per member, its current target, its drifted holdings and its
    log wealth, all commission-free.
    """

    def __init__(self, strategies: Sequence[Strategy]):
        if not strategies:
            raise ArgumentError("strategy family is empty")
        self.strategies = list(strategies)

    def __len__(self):
        return len(self.strategies)

    def reset(self, m):
        for s in self.strategies:
            s.reset(m)
        k = len(self.strategies)
        self.targets = np.tile(uniform(m), (k, 1))
        self.held = self.targets.copy()
        self.log_wealth = np.zeros(k)
        self.last_ratios = np.ones(k)

    def step(self, t, history):
        if t > 0:
            x = history[-1]
            self.last_ratios = self.targets @ x
            self.log_wealth += np.log(self.last_ratios)
            self.held = np.array([drift_weights(b, x) for b in self.targets])
        self.targets = np.array([
            normalize(s.next_portfolio(t, history, self.held[k]))
            for k, s in enumerate(self.strategies)
        ])
        return self.targets

    def weights(self):
        """Current buy-and-hold shares of the members."""
        return np.exp(self.log_wealth - logsumexp(self.log_wealth))


class BahOver(Strategy):
    """BAH over a family, flattened to one portfolio over the real assets."""

    def __init__(self, strategies: Sequence[Strategy], name='bah-over'):
        self.family = Family(strategies)
        self.name = name

    def reset(self, m):
        super().reset(m)
        self.family.reset(m)

    def next_portfolio(self, t, history, b_hat):
        targets = self.family.step(t, history)
        return self.family.weights() @ targets


class Compound(Strategy):
    """
    BAH over ANTICOR_{w'} (w' = 2..W) trading the wealth curves of
    ANTICOR_w (w = 2..W) on the real market.

    The derived market row for day t is the level-1 wealth ratio of that
    day, so level 2 starts counting days together with level 1.
    """

    def __init__(self, W: int = DEFAULT_MAX_WINDOW, name='anti2'):
        self.level1 = Family(anticor_over(W))
        self.level2 = Family(anticor_over(W))
        self.name = name

    def reset(self, m):
        if m < 2:
            raise DimensionError(f"ANTICOR needs at least 2 assets, got {m}")
        super().reset(m)
        self.level1.reset(m)
        self.level2.reset(len(self.level1))
        self._derived = np.empty((64, len(self.level1)))

    def _append(self, t, row):
        if t > self._derived.shape[0]:
            grown = np.empty((2 * self._derived.shape[0], self._derived.shape[1]))
            grown[:self._derived.shape[0]] = self._derived
            self._derived = grown
        self._derived[t - 1] = row

    def next_portfolio(self, t, history, b_hat):
        inner = self.level1.step(t, history)
        if t > 0:
            self._append(t, self.level1.last_ratios)
        derived = self._derived[:t]
        outer = self.level2.step(t, derived)
        meta = self.level2.weights() @ outer
        return meta @ inner


def anti1(W: int = DEFAULT_MAX_WINDOW) -> Strategy:
    logging.info("[Meta] BAH_%d(ANTICOR) over %d window(s)", W, W - 1)
    return BahOver(anticor_over(W), name='anti1')


def anti2(W: int = DEFAULT_MAX_WINDOW) -> Strategy:
    logging.info("[Meta] BAH_%d(ANTICOR(ANTICOR)), %d x %d window(s)", W, W - 1, W - 1)
    return Compound(W)
