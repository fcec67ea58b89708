# portfolio.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from anticor.constants import SIMPLEX_TOL
from anticor.exceptions import ArgumentError, DataValidationError, DimensionError
from anticor.market import MarketSequence


@dataclass(frozen=True)
class Portfolio:
    """Weights on the probability simplex; renormalized on construction."""
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DimensionError(f"portfolio must be a non-empty vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < -SIMPLEX_TOL):
            raise DataValidationError(f"portfolio weights must be nonnegative, got {w}")
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if total <= 0:
            raise DataValidationError("portfolio weights sum to zero")
        w = w / total
        w.setflags(write=False)
        object.__setattr__(self, 'weights', w)

    @classmethod
    def uniform(cls, m: int) -> "Portfolio":
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def indicator(cls, j: int, m: int) -> "Portfolio":
        w = np.zeros(m)
        w[j] = 1.0
        return cls(w)

    @property
    def size(self) -> int:
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)


@dataclass(frozen=True)
class WealthSeries:
    """Cumulative wealth per $1, kept as log wealth; log_values[0] == 0."""
    log_values: np.ndarray

    def __post_init__(self):
        lv = np.array(self.log_values, dtype=float)
        if lv.ndim != 1 or lv.size == 0 or lv[0] != 0.0:
            raise DimensionError("wealth series must start at log wealth 0")
        lv.setflags(write=False)
        object.__setattr__(self, 'log_values', lv)

    @classmethod
    def from_factors(cls, factors: np.ndarray) -> "WealthSeries":
        factors = np.asarray(factors, dtype=float)
        return cls(np.concatenate(([0.0], np.cumsum(np.log(factors)))))

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def final(self) -> float:
        return float(np.exp(self.log_values[-1]))

    @property
    def n_days(self) -> int:
        return self.log_values.size - 1

    def daily_ratios(self) -> np.ndarray:
        return np.exp(np.diff(self.log_values))


PortfolioSequence = Union[Sequence[Portfolio], np.ndarray]


def _vector(b) -> np.ndarray:
    return np.asarray(b.weights if isinstance(b, Portfolio) else b, dtype=float)


def _matrix(portfolios: PortfolioSequence, x: MarketSequence) -> np.ndarray:
    if isinstance(portfolios, np.ndarray):
        b = np.asarray(portfolios, dtype=float)
    else:
        b = np.array([_vector(p) for p in portfolios], dtype=float)
    if b.ndim != 2 or b.shape[0] != x.n_days:
        raise DimensionError(f"need one portfolio per day: {b.shape[0] if b.ndim else 0} portfolios, {x.n_days} days")
    if b.shape[1] != x.n_assets:
        raise DimensionError(f"portfolio size {b.shape[1]} does not match {x.n_assets} assets")
    return b


def _check_pair(b: np.ndarray, x: np.ndarray) -> None:
    if b.shape != x.shape:
        raise DimensionError(f"portfolio size {b.shape} does not match market vector {x.shape}")


def daily_return(b, x) -> float:
    b, x = _vector(b), np.asarray(x, dtype=float)
    _check_pair(b, x)
    return float(b @ x)


def drift_weights(b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Unchecked drift for the day loop; `b` and `x` already match."""
    grown = b * x
    return grown / grown.sum()


def drift(b, x) -> Portfolio:
    """Holdings after one day of price moves, before any rebalancing."""
    b, x = _vector(b), np.asarray(x, dtype=float)
    _check_pair(b, x)
    return Portfolio(drift_weights(b, x))


def drifted_holdings(b: np.ndarray, x: MarketSequence) -> np.ndarray:
    """Row t is the day-t holdings before trading: all cash (zeros) on day 1,
    else the previous target drifted by the previous day's relatives."""
    grown = b[:-1] * x.relatives[:-1]
    held = np.zeros_like(b)
    held[1:] = grown / grown.sum(axis=1, keepdims=True)
    return held


def turnover(portfolios: PortfolioSequence, x: MarketSequence) -> np.ndarray:
    b = _matrix(portfolios, x)
    return np.abs(b - drifted_holdings(b, x)).sum(axis=1)


def commission_factors(portfolios: PortfolioSequence, x: MarketSequence, gamma: float = 0.0) -> np.ndarray:
    """Per-day wealth factors b_t·x_t · (1 − γ/2 Σ_j |b_t(j) − b̂_{t−1}(j)|)."""
    if not 0.0 <= gamma < 1.0:
        raise ArgumentError(f"commission gamma must be in [0, 1), got {gamma}", gamma=gamma)
    b = _matrix(portfolios, x)
    gross = np.einsum('ij,ij->i', b, x.relatives)
    cost = 1.0 - (gamma / 2.0) * np.abs(b - drifted_holdings(b, x)).sum(axis=1)
    assert np.all(cost > 0), "commission factor must stay positive for gamma < 1"
    return gross * cost


def wealth_series(portfolios: PortfolioSequence, x: MarketSequence, gamma: float = 0.0) -> WealthSeries:
    return WealthSeries.from_factors(commission_factors(portfolios, x, gamma))


def total_return(portfolios: PortfolioSequence, x: MarketSequence) -> float:
    """Compound return ∏ b_t·x_t (no commissions)."""
    b = _matrix(portfolios, x)
    return WealthSeries.from_factors(np.einsum('ij,ij->i', b, x.relatives)).final


def commission_return(portfolios: PortfolioSequence, x: MarketSequence, gamma: float) -> float:
    return wealth_series(portfolios, x, gamma).final
