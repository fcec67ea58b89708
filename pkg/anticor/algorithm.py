# algorithm.py – the single-window ANTICOR_w trading rule
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from anticor.base import Strategy
from anticor.constants import MIN_WINDOW
from anticor.exceptions import ArgumentError, DimensionError, InsufficientHistoryError
from anticor.market import MarketSequence
from anticor.portfolio import Portfolio


@dataclass(frozen=True)
class WindowStats:
    lx1: np.ndarray       # w x m, log relatives of days [t-2w+1, t-w]
    lx2: np.ndarray       # w x m, log relatives of days [t-w+1, t]
    mu1: np.ndarray
    mu2: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray

    @property
    def w(self) -> int:
        return self.lx1.shape[0]


@dataclass(frozen=True)
class CorrelationPair:
    m_cov: np.ndarray
    m_cor: np.ndarray


@dataclass(frozen=True)
class ClaimMatrix:
    claims: np.ndarray


def _relatives(x) -> np.ndarray:
    return x.relatives if isinstance(x, MarketSequence) else np.asarray(x, dtype=float)


def _column_std(lx: np.ndarray) -> np.ndarray:
    sigma = lx.std(axis=0, ddof=1)
    # a constant column must read as exactly zero, not as rounding noise
    sigma[np.ptp(lx, axis=0) == 0] = 0.0
    return sigma


def log_windows(x: Union[MarketSequence, np.ndarray], t: int, w: int) -> WindowStats:
    """Log relatives of the two most recent consecutive w-day windows ending at day t (1-indexed)."""
    if w < MIN_WINDOW:
        raise ArgumentError(f"window must be >= {MIN_WINDOW}, got {w}", window=w)
    rel = _relatives(x)
    if t < 2 * w or t > rel.shape[0]:
        raise InsufficientHistoryError(f"day {t} needs 2w={2 * w} days of history inside {rel.shape[0]}",
                                       day=t, window=w)
    lx1 = np.log(rel[t - 2 * w:t - w])
    lx2 = np.log(rel[t - w:t])
    return WindowStats(lx1, lx2, lx1.mean(axis=0), lx2.mean(axis=0), _column_std(lx1), _column_std(lx2))


def cross_correlation(s: WindowStats) -> CorrelationPair:
    w = s.w
    if w < MIN_WINDOW:
        raise ArgumentError(f"window must be >= {MIN_WINDOW}, got {w}", window=w)
    m_cov = (s.lx1 - s.mu1).T @ (s.lx2 - s.mu2) / (w - 1)
    denom = np.outer(s.sigma1, s.sigma2)
    m_cor = np.zeros_like(m_cov)
    np.divide(m_cov, denom, out=m_cor, where=denom != 0)
    return CorrelationPair(m_cov, np.clip(m_cor, -1.0, 1.0))


def claims(c: CorrelationPair, mu2: np.ndarray) -> ClaimMatrix:
    """claim(i→j) = Mcor(i,j) + A(i) + A(j) where μ2(i) > μ2(j) and Mcor(i,j) > 0."""
    m_cor = c.m_cor
    mu2 = np.asarray(mu2, dtype=float)
    if m_cor.shape != (mu2.size, mu2.size):
        raise DimensionError(f"correlation {m_cor.shape} does not match {mu2.size} means")
    diag = np.diag(m_cor)
    a = np.where(diag < 0, -diag, 0.0)
    gate = (mu2[:, None] > mu2[None, :]) & (m_cor > 0)
    out = np.where(gate, m_cor + a[:, None] + a[None, :], 0.0)
    np.fill_diagonal(out, 0.0)
    return ClaimMatrix(out)


def transfers(cl: ClaimMatrix, b_hat) -> Portfolio:
    b = np.asarray(b_hat.weights if isinstance(b_hat, Portfolio) else b_hat, dtype=float)
    c = cl.claims
    if c.shape != (b.size, b.size):
        raise DimensionError(f"claims {c.shape} do not match portfolio of {b.size}")
    total = c.sum(axis=1)
    share = np.zeros_like(c)
    np.divide(c, total[:, None], out=share, where=total[:, None] > 0)
    moved = b[:, None] * share
    new = b - moved.sum(axis=1) + moved.sum(axis=0)
    return Portfolio(np.clip(new, 0.0, None))


def anticor_step(w: int, t: int, history, b_hat) -> Portfolio:
    """One call of the ANTICOR routine: the next portfolio from day-t history and b̂_t."""
    if t < 2 * w:
        return b_hat if isinstance(b_hat, Portfolio) else Portfolio(b_hat)
    stats = log_windows(history, t, w)
    return transfers(claims(cross_correlation(stats), stats.mu2), b_hat)


class Anticor(Strategy):
    """ANTICOR_w as an online strategy; holds its uniform start through warm-up."""

    def __init__(self, w: int):
        if w < MIN_WINDOW:
            raise ArgumentError(f"window must be >= {MIN_WINDOW}, got {w}", window=w)
        self.w = w
        self.name = f"anticor_w{w}"

    def next_portfolio(self, t, history, b_hat):
        if t < 2 * self.w:
            return b_hat
        stats = log_windows(history, t, self.w)
        return transfers(claims(cross_correlation(stats), stats.mu2), b_hat).weights
