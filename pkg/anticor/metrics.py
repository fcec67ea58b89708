# metrics.py
from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from anticor.constants import RISK_FREE_RATE, TRADING_DAYS
from anticor.exceptions import ArgumentError, DimensionError
from anticor.portfolio import WealthSeries


class PerformanceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    total_return: float = Field(gt=0)
    annualized_return: float
    annualized_risk: float = Field(ge=0)
    sharpe: Optional[float] = None          # None when risk is zero
    daily_growth: float = Field(gt=0)
    n_days: int = Field(ge=2)


def annualize(daily_returns: Sequence[float], trading_days: int = TRADING_DAYS,
              risk_free: float = RISK_FREE_RATE) -> PerformanceReport:
    """
    Annualized return (geometric mean of daily ratios), risk (sample
    standard deviation of daily ratios × √trading_days) and Sharpe ratio
    ((return − risk-free) / risk).
    """
    r = np.asarray(daily_returns, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise DimensionError(f"annualizing needs at least 2 daily returns, got {r.size}")
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise ArgumentError("daily returns must be positive and finite")
    if trading_days <= 0:
        raise ArgumentError(f"trading days per year must be positive, got {trading_days}")

    n = r.size
    log_total = float(np.log(r).sum())
    annual_return = math.expm1(log_total * trading_days / n)
    risk = float(r.std(ddof=1)) * math.sqrt(trading_days)
    sharpe = (annual_return - risk_free) / risk if risk > 0 else None
    if sharpe is None:
        logging.debug("[Metrics] zero risk over %d day(s), Sharpe undefined", n)
    return PerformanceReport(
        total_return=math.exp(log_total),
        annualized_return=annual_return,
        annualized_risk=risk,
        sharpe=sharpe,
        daily_growth=math.exp(log_total / n),
        n_days=n,
    )


def report_from_wealth(wealth: WealthSeries, trading_days: int = TRADING_DAYS,
                       risk_free: float = RISK_FREE_RATE) -> PerformanceReport:
    return annualize(wealth.daily_ratios(), trading_days, risk_free)
