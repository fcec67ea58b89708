# lz.py – LZ78 incremental parse tree used as a winner predictor
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class LZNode:
    children: dict = field(default_factory=dict)
    count: int = 0


class LZPredictor:
    """
    LZ78 parsing of a symbol stream with next-symbol probabilities read
    off the current context node, blended with the overall symbol
    frequencies.

    Each symbol walks one edge down from the current node. When the edge
    does not exist yet the phrase ends: a new leaf is added and the
    context returns to the root. Probabilities are proportional to
    1 + (symbol frequency so far) + (child visit count at the context
    node), so a childless context backs off to the frequencies and every
    symbol keeps positive probability.
    """

    def __init__(self, alphabet: int):
        self.alphabet = alphabet
        self.root = LZNode()
        self.node = self.root
        self.phrases = 0
        self.freq = np.zeros(alphabet)

    @property
    def at_root(self) -> bool:
        return self.node is self.root

    def update(self, symbol: int) -> None:
        self.root.count += 1
        self.freq[symbol] += 1
        child = self.node.children.get(symbol)
        if child is None:
            self.node.children[symbol] = LZNode(count=1)
            self.node = self.root
            self.phrases += 1
            return
        child.count += 1
        self.node = child

    def predict(self) -> np.ndarray:
        counts = 1.0 + self.freq
        for symbol, child in self.node.children.items():
            counts[symbol] += child.count
        return counts / counts.sum()
