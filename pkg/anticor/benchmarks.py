# benchmarks.py – comparison strategies: BAH, CBAL, CBAL*, EG, UNIVERSAL, LZ
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp
from scipy.stats import dirichlet

from anticor.base import BuyAndHold, ConstantRebalanced, Strategy, uniform
from anticor.constants import (
    CBAL_STAR_MAX_ITER, CBAL_STAR_TOL, DEFAULT_ETA, DEFAULT_SAMPLES, DEFAULT_SEED,
    DIRICHLET_ALPHA,
)
from anticor.exceptions import ArgumentError, ConvergenceError, DimensionError
from anticor.lz import LZPredictor
from anticor.market import MarketSequence
from anticor.portfolio import Portfolio


# ---------------------------------------------------------------------- #
# Buy-and-hold / constant rebalancing
# ---------------------------------------------------------------------- #

def bah(b) -> Strategy:
    return BuyAndHold(np.asarray(b.weights if isinstance(b, Portfolio) else b, dtype=float))


def u_bah() -> Strategy:
    return BuyAndHold()


def cbal(b) -> Strategy:
    return ConstantRebalanced(np.asarray(b.weights if isinstance(b, Portfolio) else b, dtype=float))


def u_cbal() -> Strategy:
    return ConstantRebalanced()


def best_stock_hindsight(x: MarketSequence) -> Portfolio:
    """Indicator of the asset with the largest product of relatives; ties → lowest index."""
    growth = np.log(x.relatives).sum(axis=0)
    return Portfolio.indicator(int(np.argmax(growth)), x.n_assets)


# ---------------------------------------------------------------------- #
# CBAL* – log-optimal constant rebalanced portfolio in hindsight
# ---------------------------------------------------------------------- #

@dataclass(frozen=True)
class CbalStar:
    portfolio: Portfolio
    total_return: float
    iterations: int
    gap: float


def _neg_log_wealth(b: np.ndarray, rel: np.ndarray) -> float:
    return -float(np.log(rel @ b).sum())


def _neg_log_wealth_grad(b: np.ndarray, rel: np.ndarray) -> np.ndarray:
    return -(rel / (rel @ b)[:, None]).sum(axis=0)


def cbal_star(x: MarketSequence, tol: float = CBAL_STAR_TOL,
              max_iter: int = CBAL_STAR_MAX_ITER) -> CbalStar:
    """
    Maximize Σ_t ln(b·x_t) over the simplex with SLSQP, uniform start.

    The reported gap n·(max_j g_j − 1), g_j = (1/n) Σ_t x_t(j) / (b·x_t),
    bounds how far the log wealth is below the optimum. Hitting the
    iteration cap with a gap above `tol` raises ConvergenceError. The
    result is never worse than the best single asset.
    """
    if tol <= 0:
        raise ArgumentError(f"tolerance must be positive, got {tol}", tol=tol)
    rel = x.relatives
    n, m = rel.shape
    res = minimize(
        _neg_log_wealth,
        uniform(m),
        args=(rel,),
        jac=_neg_log_wealth_grad,
        method='SLSQP',
        bounds=[(0.0, 1.0)] * m,
        constraints=[{'type': 'eq', 'fun': lambda b: b.sum() - 1.0, 'jac': lambda b: np.ones_like(b)}],
        options={'ftol': tol, 'maxiter': max_iter},
    )
    b = np.clip(res.x, 0.0, None)
    b /= b.sum()
    value = -_neg_log_wealth(b, rel)
    gap = max(float(n * ((rel / (rel @ b)[:, None]).mean(axis=0).max() - 1.0)), 0.0)
    if res.status == 9 and gap > tol:
        raise ConvergenceError(f"CBAL* did not converge in {max_iter} iterations (gap {gap:.3g})",
                               best=Portfolio(b), objective=value, iterations=int(res.nit))

    growth = np.log(rel).sum(axis=0)
    j = int(np.argmax(growth))
    if growth[j] >= value:
        b, value = np.eye(m)[j], float(growth[j])
        gap = max(float(n * ((rel / rel[:, j][:, None]).mean(axis=0).max() - 1.0)), 0.0)
    logging.info("[CBAL*] %s after %d iteration(s), log wealth %.10g, gap %.3g",
                 res.message, res.nit, value, gap)
    return CbalStar(Portfolio(b), float(np.exp(value)), int(res.nit), gap)


# ---------------------------------------------------------------------- #
# Exponentiated gradient
# ---------------------------------------------------------------------- #

class ExponentiatedGradient(Strategy):
    """EG(η): b_{t+1}(j) ∝ b_t(j) exp(η x_t(j) / b_t·x_t), uniform start."""

    def __init__(self, eta: float = DEFAULT_ETA):
        if eta < 0:
            raise ArgumentError(f"eta must be >= 0, got {eta}", eta=eta)
        self.eta = eta
        self.name = 'eg'

    def reset(self, m):
        super().reset(m)
        self.b = uniform(m)

    def next_portfolio(self, t, history, b_hat):
        if t > 0:
            x = history[-1]
            logits = np.log(self.b) + self.eta * x / (self.b @ x)
            w = np.exp(logits - logits.max())
            self.b = w / w.sum()
        return self.b


def eg(eta: float = DEFAULT_ETA) -> Strategy:
    return ExponentiatedGradient(eta)


# ---------------------------------------------------------------------- #
# Universal portfolio, Dirichlet(½,…,½) prior by Monte-Carlo
# ---------------------------------------------------------------------- #

@dataclass(frozen=True)
class DirichletSampler:
    """Dirichlet prior over the simplex; a scalar `alpha` is the symmetric prior."""
    alpha: Union[float, Tuple[float, ...]] = DIRICHLET_ALPHA
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not np.isscalar(self.alpha):
            object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if np.any(np.asarray(self.alpha) <= 0):
            raise ArgumentError(f"dirichlet alpha must be > 0, got {self.alpha}")

    def concentration(self, m: int) -> np.ndarray:
        if np.isscalar(self.alpha):
            return np.full(m, float(self.alpha))
        if len(self.alpha) != m:
            raise DimensionError(f"{len(self.alpha)} dirichlet parameters for {m} assets")
        return np.asarray(self.alpha)

    def sample(self, m: int, n_samples: int) -> np.ndarray:
        alpha = self.concentration(m)
        if m == 1:
            return np.ones((n_samples, 1))
        rng = np.random.default_rng(self.seed)
        s = dirichlet.rvs(alpha, size=n_samples, random_state=rng)
        return s / s.sum(axis=1, keepdims=True)


class Universal(Strategy):
    """
    Return-weighted average of N sampled CBALs drawn once from the prior.

    Equivalent to holding each sampled CBAL with 1/N of the initial
    wealth, so the final wealth is the mean of the sampled CBAL wealths.
    """

    def __init__(self, sampler: DirichletSampler, n_samples: int = DEFAULT_SAMPLES):
        if n_samples < 1:
            raise ArgumentError(f"n_samples must be >= 1, got {n_samples}", n_samples=n_samples)
        self.sampler = sampler
        self.n_samples = n_samples
        self.name = 'universal'

    def reset(self, m):
        super().reset(m)
        self.samples = self.sampler.sample(m, self.n_samples)
        self.log_wealth = np.zeros(self.n_samples)

    def next_portfolio(self, t, history, b_hat):
        if t > 0:
            self.log_wealth += np.log(self.samples @ history[-1])
        if self.n_samples == 1:
            return self.samples[0]
        weights = np.exp(self.log_wealth - logsumexp(self.log_wealth))
        return weights @ self.samples

    def sampled_wealth(self, x: MarketSequence) -> np.ndarray:
        """Final wealth of each sampled CBAL on `x`."""
        samples = self.sampler.sample(x.n_assets, self.n_samples)
        return np.exp(np.log(x.relatives @ samples.T).sum(axis=0))


def universal(sampler: Optional[DirichletSampler] = None, n_samples: int = DEFAULT_SAMPLES) -> Strategy:
    return Universal(sampler or DirichletSampler(), n_samples)


def universal_band(x: MarketSequence, seeds: Sequence[int], n_samples: int = DEFAULT_SAMPLES):
    """Mean and standard error of UNIVERSAL final wealth across seeds."""
    if not seeds:
        raise ArgumentError("universal band needs at least one seed")
    finals = []
    for seed in seeds:
        u = Universal(DirichletSampler(seed=seed), n_samples)
        finals.append(float(u.sampled_wealth(x).mean()))
    finals = np.array(finals)
    stderr = finals.std(ddof=1) / np.sqrt(finals.size) if finals.size > 1 else 0.0
    return float(finals.mean()), float(stderr)


# ---------------------------------------------------------------------- #
# LZ winner prediction
# ---------------------------------------------------------------------- #

class LempelZiv(Strategy):
    """Invest the LZ78 probability that each asset is tomorrow's best performer."""
    name = 'lz'

    def reset(self, m):
        super().reset(m)
        self.tree = LZPredictor(m)

    def next_portfolio(self, t, history, b_hat):
        if t > 0:
            self.tree.update(int(np.argmax(history[-1])))
        return self.tree.predict()


def lz_strategy() -> Strategy:
    return LempelZiv()
