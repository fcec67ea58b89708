# backtest.py
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from pydantic import (
    BaseModel, ConfigDict, Field, StrictInt, ValidationError, field_validator, model_validator,
)

from anticor.algorithm import Anticor
from anticor.base import Strategy
from anticor.benchmarks import (
    DirichletSampler, bah, best_stock_hindsight, cbal, cbal_star, eg, lz_strategy, u_bah, u_cbal,
    universal, universal_band,
)
from anticor.constants import (
    CBAL_STAR_TOL, DEFAULT_ETA, DEFAULT_MAX_WINDOW, DEFAULT_SAMPLES, DEFAULT_SEED,
    RISK_FREE_RATE, TRADING_DAYS,
)
from anticor.engine import portfolios_of, simulate
from anticor.exceptions import ArgumentError, DimensionError
from anticor.market import MarketSequence, reverse_market
from anticor.meta import anti1, anti2
from anticor.metrics import PerformanceReport, report_from_wealth
from anticor.portfolio import WealthSeries, commission_return, turnover


def validated(model, **values):
    """Build a pydantic model, turning validation failures into ArgumentError."""
    try:
        return model(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = '.'.join(str(p) for p in first.get('loc', ())) or model.__name__
        raise ArgumentError(f"invalid {where}: {first.get('msg')}", errors=exc.errors())


# ---------------------------------------------------------------------- #
# Run specification
# ---------------------------------------------------------------------- #

class StrategyParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    w: Optional[int] = Field(default=None, ge=2)
    W: int = Field(default=DEFAULT_MAX_WINDOW, ge=2)
    eta: float = Field(default=DEFAULT_ETA, ge=0)
    n_samples: int = Field(default=DEFAULT_SAMPLES, ge=1)
    tol: float = Field(default=CBAL_STAR_TOL, gt=0)
    weights: Optional[List[float]] = None


class RunSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    market_id: str = "market"
    strategy: str
    params: StrategyParams = Field(default_factory=StrategyParams)
    gamma: float = Field(default=0.0, ge=0.0, lt=1.0)
    seed: int = DEFAULT_SEED

    @field_validator("strategy")
    @classmethod
    def _known(cls, v: str) -> str:
        if v not in STRATEGIES:
            raise ValueError(f"unknown strategy {v!r}; expected one of {', '.join(STRATEGIES)}")
        return v

    @model_validator(mode="after")
    def _needs(self) -> "RunSpec":
        if self.strategy == "anticor" and self.params.w is None:
            raise ValueError("strategy 'anticor' needs a window w >= 2")
        if self.strategy in ("bah", "cbal") and not self.params.weights:
            raise ValueError(f"strategy {self.strategy!r} needs portfolio weights")
        return self


def _weights(p: StrategyParams, x: MarketSequence) -> np.ndarray:
    w = np.asarray(p.weights, dtype=float)
    if w.size != x.n_assets:
        raise DimensionError(f"{w.size} weights given for {x.n_assets} assets")
    return w


# id → (factory(params, market, seed), one-line description)
STRATEGIES: Dict[str, tuple] = {
    "u-bah": (lambda p, x, seed: u_bah(), "uniform buy-and-hold (the market)"),
    "bah": (lambda p, x, seed: bah(_weights(p, x)), "buy-and-hold of --weights"),
    "best-stock": (lambda p, x, seed: bah(best_stock_hindsight(x)), "best single asset in hindsight"),
    "u-cbal": (lambda p, x, seed: u_cbal(), "uniform constant rebalancing"),
    "cbal": (lambda p, x, seed: cbal(_weights(p, x)), "constant rebalancing to --weights"),
    "cbal-star": (lambda p, x, seed: cbal(cbal_star(x, p.tol).portfolio), "best constant rebalancing in hindsight"),
    "eg": (lambda p, x, seed: eg(p.eta), "exponentiated gradient EG(eta)"),
    "universal": (lambda p, x, seed: universal(DirichletSampler(seed=seed), p.n_samples),
                  "universal portfolio, Dirichlet(1/2) prior"),
    "lz": (lambda p, x, seed: lz_strategy(), "LZ78 winner prediction"),
    "anticor": (lambda p, x, seed: Anticor(p.w), "ANTICOR_w, single window --w"),
    "anti1": (lambda p, x, seed: anti1(p.W), "BAH_W(ANTICOR)"),
    "anti2": (lambda p, x, seed: anti2(p.W), "BAH_W(ANTICOR(ANTICOR))"),
}

TABLE_STRATEGIES = ("u-bah", "best-stock", "cbal-star", "u-cbal", "anti1", "anti2", "lz", "eg", "universal")


def build_strategy(spec: RunSpec, x: MarketSequence) -> Strategy:
    factory, _ = STRATEGIES[spec.strategy]
    return factory(spec.params, x, spec.seed)


# ---------------------------------------------------------------------- #
# Single run
# ---------------------------------------------------------------------- #

@dataclass(frozen=True)
class RunResult:
    spec: RunSpec
    portfolios: np.ndarray
    wealth: WealthSeries
    report: Optional[PerformanceReport]
    turnover: float = 0.0  # mean daily Σ|b_t − b̂_t| after the day-1 purchase

    @property
    def final(self) -> float:
        return self.wealth.final


def run(spec: RunSpec, x: MarketSequence, trading_days: int = TRADING_DAYS,
        risk_free: float = RISK_FREE_RATE) -> RunResult:
    """Online day-by-day execution of one strategy on one market."""
    strategy = build_strategy(spec, x)
    bt = simulate(strategy, x, spec.gamma)
    report = None
    if x.n_days >= 2:
        report = report_from_wealth(bt.wealth, trading_days, risk_free)
    else:
        logging.warning("[Sweep] %s: %d day(s), no annualized metrics", spec.strategy, x.n_days)
    logging.info("[Sweep] %s on %s (gamma=%g) → %.6g", spec.strategy, spec.market_id, spec.gamma, bt.final)
    traded = turnover(bt.portfolios, x)[1:]
    return RunResult(spec, bt.portfolios, bt.wealth, report, float(traded.mean()) if traded.size else 0.0)


def audit_causality(factory: Callable[[], Strategy], x: MarketSequence,
                    checkpoints: Optional[Iterable[int]] = None) -> bool:
    """
    Shadow runs that must reproduce the full run's decisions:

        • on the first t days only       → decisions 0..t-1
        • with days t.. replaced by their
          reversed reciprocals            → decisions 0..t
    """
    full = portfolios_of(factory(), x)
    if checkpoints is None:
        checkpoints = sorted({1, max(1, x.n_days // 3), max(1, 2 * x.n_days // 3), x.n_days})
    for t in checkpoints:
        shadow = portfolios_of(factory(), x.prefix(t))
        if not np.array_equal(shadow, full[:t]):
            logging.warning("[Sweep] lookahead: decisions differ on a %d-day prefix", t)
            return False
        if t < x.n_days:
            future = 1.0 / x.relatives[t:][::-1]
            altered = MarketSequence(x.names, np.concatenate([x.relatives[:t], future]))
            shadow = portfolios_of(factory(), altered)
            if not np.array_equal(shadow[:t + 1], full[:t + 1]):
                logging.warning("[Sweep] lookahead: decision %d depends on later days", t)
                return False
    return True


# ---------------------------------------------------------------------- #
# Sweeps
# ---------------------------------------------------------------------- #

class SweepResult(BaseModel):
    axis: str
    values: List[Union[StrictInt, float]]
    series: Dict[str, List[float]]

    @field_validator("values")
    @classmethod
    def _increasing(cls, v: List[float]) -> List[float]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("sweep axis must be strictly increasing")
        return v

    @model_validator(mode="after")
    def _aligned(self) -> "SweepResult":
        for name, ys in self.series.items():
            if len(ys) != len(self.values):
                raise ValueError(f"series {name!r} has {len(ys)} points for {len(self.values)} axis values")
        return self


def _axis(values: Sequence, name: str) -> List:
    values = list(values)
    if not values:
        raise ArgumentError(f"{name} range is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ArgumentError(f"{name} range must be strictly increasing")
    return values


def _fan_out(jobs: Dict[object, Callable[[], float]], max_workers: int) -> Dict[object, float]:
    """Run keyed jobs; the result dict does not depend on completion order."""
    if max_workers <= 1:
        return {key: job() for key, job in jobs.items()}
    results = {}
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        fut = {pool.submit(job): key for key, job in jobs.items()}
        for f in as_completed(fut):
            results[fut[f]] = f.result()
            logging.info("[Sweep] %s done (%d/%d)", fut[f], len(results), len(jobs))
    return results


def _baselines(x: MarketSequence, gammas: Sequence[float]) -> Dict[str, List[float]]:
    market = portfolios_of(u_bah(), x)
    best = portfolios_of(bah(best_stock_hindsight(x)), x)
    return {
        "market": [commission_return(market, x, g) for g in gammas],
        "best-stock": [commission_return(best, x, g) for g in gammas],
    }


def sweep_window(x: MarketSequence, w_range: Sequence[int], gamma: float = 0.0,
                 max_workers: int = 1) -> SweepResult:
    """Final return of ANTICOR_w for every w in `w_range`."""
    ws = [int(w) for w in _axis(w_range, "window")]
    if ws[0] < 2:
        raise ArgumentError(f"windows must be >= 2, got {ws[0]}")
    finals = _fan_out({w: (lambda w=w: simulate(Anticor(w), x, gamma).final) for w in ws}, max_workers)
    series = {"anticor": [finals[w] for w in ws]}
    base = _baselines(x, [gamma])
    for name, (value,) in base.items():
        series[name] = [value] * len(ws)
    if gamma == 0.0:
        series["bah-anticor"] = [float(np.mean(series["anticor"]))] * len(ws)
    return SweepResult(axis="w", values=ws, series=series)


def sweep_max_window(x: MarketSequence, W_range: Sequence[int], gamma: float = 0.0,
                     max_workers: int = 1) -> SweepResult:
    """Final return of BAH_W(ANTICOR) for every W in `W_range`.

    Without commissions BAH_W is the mean of the ANTICOR_w finals for
    w ≤ W, so each window runs once; with commissions every W is a full
    flattened run.
    """
    Ws = [int(W) for W in _axis(W_range, "max window")]
    if Ws[0] < 2:
        raise ArgumentError(f"max window must be >= 2, got {Ws[0]}")
    if gamma == 0.0:
        windows = range(2, Ws[-1] + 1)
        finals = _fan_out({w: (lambda w=w: simulate(Anticor(w), x).final) for w in windows}, max_workers)
        curve = [float(np.mean([finals[w] for w in range(2, W + 1)])) for W in Ws]
    else:
        finals = _fan_out({W: (lambda W=W: simulate(anti1(W), x, gamma).final) for W in Ws}, max_workers)
        curve = [finals[W] for W in Ws]
    series = {"anti1": curve}
    for name, (value,) in _baselines(x, [gamma]).items():
        series[name] = [value] * len(Ws)
    return SweepResult(axis="W", values=Ws, series=series)


def sweep_commission(x: MarketSequence, gammas: Sequence[float], strategy: str = "anti1",
                     params: Optional[dict] = None, seed: int = DEFAULT_SEED) -> SweepResult:
    """Commission sensitivity; the strategy's decisions do not depend on gamma,
    so its portfolio sequence is recorded once and charged at every rate."""
    gs = _axis(gammas, "commission")
    if gs[0] < 0 or gs[-1] >= 1:
        raise ArgumentError(f"commission rates must lie in [0, 1), got {gs[0]}..{gs[-1]}")
    spec = validated(RunSpec, strategy=strategy, params=params or {}, seed=seed)
    recorded = portfolios_of(build_strategy(spec, x), x)
    series = {strategy: [commission_return(recorded, x, g) for g in gs]}
    series.update(_baselines(x, gs))
    return SweepResult(axis="gamma", values=gs, series=series)


# ---------------------------------------------------------------------- #
# Tables
# ---------------------------------------------------------------------- #

class Table(BaseModel):
    """Rows are strategies, columns markets. `kind` is 'returns' or 'metrics'."""
    kind: str = "returns"
    rows: List[str]
    columns: List[str]
    cells: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    errors: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    reports: Dict[str, Dict[str, Optional[PerformanceReport]]] = Field(default_factory=dict)
    meta: Dict[str, str] = Field(default_factory=dict)


def _market_columns(markets: Dict[str, MarketSequence], with_reversed: bool) -> Dict[str, MarketSequence]:
    columns = dict(markets)
    if with_reversed:
        for name, x in markets.items():
            columns[f"{name}^-1"] = reverse_market(x)
    return columns


def _run_grid(markets, strategies, params, gamma, seed, max_workers):
    specs = {(s, name): validated(RunSpec, market_id=name, strategy=s, params=params, gamma=gamma, seed=seed)
             for s in strategies for name in markets}
    jobs = {key: (lambda spec=spec, x=markets[key[1]]: run(spec, x)) for key, spec in specs.items()}
    return _fan_out(jobs, max_workers)


def run_table(markets: Dict[str, MarketSequence], strategies: Sequence[str] = TABLE_STRATEGIES,
              params: Optional[dict] = None, gamma: float = 0.0, seed: int = DEFAULT_SEED,
              with_reversed: bool = False, band_seeds: int = 0, max_workers: int = 1) -> Table:
    """Total returns per (strategy, market). With `band_seeds` > 1 the
    UNIVERSAL row is the mean over that many seeds, with its standard error."""
    columns = _market_columns(markets, with_reversed)
    params = params or {}
    results = _run_grid(columns, strategies, params, gamma, seed, max_workers)
    table = Table(kind="returns", rows=list(strategies), columns=list(columns),
                  meta={"seed": str(seed), "gamma": repr(gamma)})
    for s in strategies:
        table.cells[s] = {name: results[(s, name)].final for name in columns}
    if "universal" in strategies and band_seeds > 1 and gamma == 0.0:
        seeds = [seed + k for k in range(band_seeds)]
        n_samples = validated(StrategyParams, **params).n_samples
        table.errors["universal"] = {}
        for name, x in columns.items():
            mean, stderr = universal_band(x, seeds, n_samples)
            table.cells["universal"][name] = mean
            table.errors["universal"][name] = stderr
        table.meta["seeds"] = f"{seeds[0]}..{seeds[-1]}"
    return table


def metrics_table(markets: Dict[str, MarketSequence], strategies: Sequence[str] = TABLE_STRATEGIES,
                  params: Optional[dict] = None, gamma: float = 0.0, seed: int = DEFAULT_SEED,
                  with_reversed: bool = False, max_workers: int = 1) -> Table:
    """Annualized return ± risk and Sharpe ratio per (strategy, market)."""
    columns = _market_columns(markets, with_reversed)
    results = _run_grid(columns, strategies, params or {}, gamma, seed, max_workers)
    table = Table(kind="metrics", rows=list(strategies), columns=list(columns),
                  meta={"seed": str(seed), "gamma": repr(gamma)})
    for s in strategies:
        table.reports[s] = {name: results[(s, name)].report for name in columns}
        table.cells[s] = {name: results[(s, name)].final for name in columns}
    return table
