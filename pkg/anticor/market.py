# market.py
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence, Union

import numpy as np

from anticor.constants import DAY_LABEL_HEADERS, FORMAT_PRICES, FORMAT_RELATIVES, INPUT_FORMATS
from anticor.exceptions import ArgumentError, DataValidationError, DimensionError, ParseError


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Daily closing prices, n days x m assets, oldest first."""
    names: tuple
    prices: np.ndarray
    day_labels: Optional[tuple] = None

    def __post_init__(self):
        prices = _frozen(self.prices)
        if prices.ndim != 2 or prices.shape[1] != len(self.names):
            raise DimensionError(f"prices shape {prices.shape} does not match {len(self.names)} names")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            row, col = np.argwhere(~(np.isfinite(prices) & (prices > 0)))[0]
            raise DataValidationError(f"price at row {row + 1}, column {self.names[col]} must be positive",
                                      row=int(row) + 1, column=self.names[col])
        object.__setattr__(self, 'names', tuple(self.names))
        object.__setattr__(self, 'prices', prices)
        if self.day_labels is not None:
            object.__setattr__(self, 'day_labels', tuple(self.day_labels))

    @property
    def n_days(self) -> int:
        return self.prices.shape[0]

    @property
    def n_assets(self) -> int:
        return self.prices.shape[1]


@dataclass(frozen=True)
class MarketSequence:
    """Relative prices x_t(j) = v_t(j) / v_{t-1}(j), n days x m assets.

    The loader insists on at least two assets; the type itself accepts a
    single asset so hindsight benchmarks and meta-markets of one
    strategy stay expressible.
    """
    names: tuple
    relatives: np.ndarray
    day_labels: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        rel = _frozen(self.relatives)
        if rel.ndim != 2 or rel.shape[1] != len(self.names):
            raise DimensionError(f"relatives shape {rel.shape} does not match {len(self.names)} names")
        if rel.shape[0] < 1 or rel.shape[1] < 1:
            raise DimensionError(f"market needs at least one day and one asset, got {rel.shape}")
        bad = ~(np.isfinite(rel) & (rel > 0))
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise DataValidationError(f"relative at row {row + 1}, column {self.names[col]} must be positive and finite",
                                      row=int(row) + 1, column=self.names[col])
        object.__setattr__(self, 'names', tuple(self.names))
        object.__setattr__(self, 'relatives', rel)
        if self.day_labels is not None:
            object.__setattr__(self, 'day_labels', tuple(self.day_labels))

    @property
    def n_days(self) -> int:
        return self.relatives.shape[0]

    @property
    def n_assets(self) -> int:
        return self.relatives.shape[1]

    def __len__(self):
        return self.n_days

    def prefix(self, days: int) -> "MarketSequence":
        labels = self.day_labels[:days] if self.day_labels else None
        return MarketSequence(self.names, self.relatives[:days], labels)


# ---------------------------------------------------------------------- #
# Loading / saving
# ---------------------------------------------------------------------- #

def _text(source: Union[IO[bytes], IO[str]]) -> IO[str]:
    if isinstance(source, io.TextIOBase):
        return source
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode('utf-8-sig'))
    return io.TextIOWrapper(source, encoding='utf-8-sig', newline='')


def _cell(raw: str, row: int, column: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise DataValidationError(f"non-numeric cell {raw!r} at row {row}, column {column}",
                                  row=row, column=column)
    if not math.isfinite(value) or value <= 0:
        raise DataValidationError(f"non-positive cell {raw!r} at row {row}, column {column}",
                                  row=row, column=column)
    return value


def load_prices(source, format: str = FORMAT_PRICES) -> Union[PriceSeries, MarketSequence]:
    """
    Parse a CSV with a header row of asset names and one row per day
    (oldest first).

    `format` selects the meaning of the cells:
        • 'csv-prices'    – closing prices  → PriceSeries
        • 'csv-relatives' – relative prices → MarketSequence

    A leading column called date/day/time is kept as day labels.
    Rows are numbered from 1 (the header is row 0).
    """
    if format not in INPUT_FORMATS:
        raise ArgumentError(f"unknown input format {format!r}, expected one of {', '.join(INPUT_FORMATS)}")

    reader = csv.reader(_text(source))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input, expected a header row", row=0)
    header = [h.strip() for h in header]

    has_labels = bool(header) and header[0].lower() in DAY_LABEL_HEADERS
    names = header[1:] if has_labels else header
    if len(names) < 2:
        raise DimensionError(f"need at least 2 assets, header names {len(names)}", assets=len(names))

    labels: list[str] = []
    rows: list[list[float]] = []
    for row_no, fields in enumerate(reader, start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != len(header):
            raise ParseError(f"row {row_no} has {len(fields)} fields, header has {len(header)}", row=row_no)
        if has_labels:
            labels.append(fields[0].strip())
            fields = fields[1:]
        rows.append([_cell(f.strip(), row_no, names[j]) for j, f in enumerate(fields)])

    if not rows:
        raise DimensionError("input has a header but no data rows")

    logging.info("[Market] loaded %d day(s) x %d asset(s) as %s", len(rows), len(names), format)
    day_labels = tuple(labels) if has_labels else None
    if format == FORMAT_PRICES:
        return PriceSeries(tuple(names), np.array(rows), day_labels)
    return MarketSequence(tuple(names), np.array(rows), day_labels)


def save_market(x: MarketSequence, sink: IO[str]) -> None:
    """Write relatives as CSV readable by load_prices(format='csv-relatives')."""
    writer = csv.writer(sink, lineterminator='\n')
    with_labels = x.day_labels is not None
    writer.writerow((['date'] if with_labels else []) + list(x.names))
    for t, row in enumerate(x.relatives):
        cells = [repr(float(v)) for v in row]
        writer.writerow(([x.day_labels[t]] if with_labels else []) + cells)


# ---------------------------------------------------------------------- #
# Transformations
# ---------------------------------------------------------------------- #

def to_relatives(p: PriceSeries) -> MarketSequence:
    if p.n_days < 2:
        raise DimensionError(f"need at least 2 days of prices, got {p.n_days}", days=p.n_days)
    rel = p.prices[1:] / p.prices[:-1]
    labels = p.day_labels[1:] if p.day_labels else None
    return MarketSequence(p.names, rel, labels)


def reverse_market(x: MarketSequence) -> MarketSequence:
    """Reverse the day order and invert every relative."""
    labels = tuple(reversed(x.day_labels)) if x.day_labels else None
    return MarketSequence(x.names, 1.0 / x.relatives[::-1], labels)


def cover_gluss(n_days: int) -> MarketSequence:
    """Cash and one stock alternating (1, 1/2), (1, 2), ... – a no-growth market."""
    if n_days <= 0 or n_days % 2:
        raise ArgumentError(f"cover-gluss needs a positive even number of days, got {n_days}", days=n_days)
    period = np.array([[1.0, 0.5], [1.0, 2.0]])
    return MarketSequence(('cash', 'stock'), np.tile(period, (n_days // 2, 1)))


def random_market(n_days: int, n_assets: int, low: float = 0.5, high: float = 2.0,
                  seed: Optional[int] = None, names: Optional[Sequence[str]] = None) -> MarketSequence:
    if n_days < 1 or n_assets < 1:
        raise ArgumentError(f"random market needs positive dimensions, got {n_days}x{n_assets}")
    if not 0 < low <= high:
        raise ArgumentError(f"random market needs 0 < low <= high, got [{low}, {high}]")
    rng = np.random.default_rng(seed)
    rel = rng.uniform(low, high, size=(n_days, n_assets))
    names = tuple(names) if names else tuple(f"s{j + 1}" for j in range(n_assets))
    return MarketSequence(names, rel)
