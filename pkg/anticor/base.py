import numpy as np


def uniform(m):
    return np.full(m, 1.0 / m)


def normalize(b):
    """Clip rounding negatives and put the vector back on the simplex."""
    b = np.clip(np.asarray(b, dtype=float), 0.0, None)
    return b / b.sum()


class Strategy(object):
    """
    An online portfolio selection rule.

    The engine calls `next_portfolio` once per day with the number of
    days observed so far, the market history for exactly those days
    (a t x m array, empty on day 0) and the strategy's own drifted
    portfolio b̂_t (uniform before the first trade). It returns the
    portfolio to rebalance to before the next day opens.

    Instances hold per-run state; call `reset` (the engine does) before
    reusing one on another market.
    """
    name = 'strategy'

    def reset(self, m):
        self.m = m

    def next_portfolio(self, t, history, b_hat):
        raise NotImplementedError

    def __repr__(self):
        return '<{} {}>'.format(type(self).__name__, self.name)


class BuyAndHold(Strategy):
    """Buy `b` on day one and never trade again."""

    def __init__(self, b=None, name=None):
        self.b = None if b is None else np.asarray(b, dtype=float)
        self.name = name or ('u-bah' if b is None else 'bah')

    def next_portfolio(self, t, history, b_hat):
        if t == 0:
            return uniform(self.m) if self.b is None else self.b
        return b_hat


class ConstantRebalanced(Strategy):
    """Rebalance to the same `b` every day."""

    def __init__(self, b=None, name=None):
        self.b = None if b is None else np.asarray(b, dtype=float)
        self.name = name or ('u-cbal' if b is None else 'cbal')

    def next_portfolio(self, t, history, b_hat):
        return uniform(self.m) if self.b is None else self.b
