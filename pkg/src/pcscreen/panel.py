"""Price/dividend panel ingestion.

Reads the prices and dividends CSV formats, aligns everything onto the
observed trading-day calendar (the union of all dates seen in the price
file), and filters the universe down to tickers with a complete history.

CSV formats:
    prices:    header ``date,ticker,close``    (date ISO-8601, close > 0)
    dividends: header ``date,ticker,amount``   (amount >= 0)
Comma-delimited, ``\\n`` or ``\\r\\n`` line endings, no quoting.
"""

from __future__ import annotations

import datetime as dt
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DuplicateKeyError,
    EmptyUniverseError,
    ParseError,
    UnknownEventError,
)

PRICES_HEADER = "date,ticker,close"
DIVIDENDS_HEADER = "date,ticker,amount"

_TICKER_OK = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._-")


@dataclass(frozen=True)
class PricePanel:
    """Aligned date x asset grid of close prices plus sparse dividend events.

    prices[i, t] is the close of tickers[i] on dates[t]; NaN marks a missing
    observation (ticker not traded that day). Dividend events are keyed by
    (ticker, date) and always reference an observed price cell.
    """

    dates: tuple[dt.date, ...]
    tickers: tuple[str, ...]
    prices: np.ndarray  # shape (p, T), float64, NaN = missing
    dividends: Mapping[tuple[str, dt.date], float] = field(default_factory=dict)

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=np.float64)
        object.__setattr__(self, "prices", prices)
        if prices.shape != (len(self.tickers), len(self.dates)):
            raise ValueError(
                f"price grid shape {prices.shape} does not match "
                f"{len(self.tickers)} tickers x {len(self.dates)} dates"
            )
        if len(set(self.tickers)) != len(self.tickers):
            raise ValueError("duplicate tickers")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        with np.errstate(invalid="ignore"):
            if np.any(prices[np.isfinite(prices)] <= 0.0):
                raise ValueError("prices must be positive")
        for (ticker, date), amount in self.dividends.items():
            if amount < 0:
                raise ValueError(f"negative dividend for {ticker} on {date}")
            if not self.has_price(ticker, date):
                raise ValueError(f"dividend for {ticker} on {date} has no price cell")

    @property
    def n_assets(self) -> int:
        return len(self.tickers)

    @property
    def n_days(self) -> int:
        return len(self.dates)

    def ticker_index(self, ticker: str) -> int:
        try:
            return self.tickers.index(ticker)
        except ValueError:
            raise KeyError(f"unknown ticker {ticker!r}") from None

    def has_price(self, ticker: str, date: dt.date) -> bool:
        if ticker not in self.tickers or date not in self.dates:
            return False
        return bool(np.isfinite(self.prices[self.tickers.index(ticker), self.dates.index(date)]))

    def is_complete(self, ticker: str) -> bool:
        """True when the ticker has a finite price on every panel date."""
        return bool(np.all(np.isfinite(self.prices[self.ticker_index(ticker)])))


def _parse_date(token: str, line_no: int) -> dt.date:
    try:
        return dt.date.fromisoformat(token)
    except ValueError:
        raise ParseError(f"unparseable date {token!r}", line_no) from None


def _check_ticker(token: str, line_no: int) -> str:
    if not token or not set(token) <= _TICKER_OK:
        raise ParseError(f"invalid ticker {token!r}", line_no)
    return token


def _rows(stream: Iterable[str] | str, header: str):
    """Yield (line_no, fields) for each non-empty body row after validating the header."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    it = iter(stream)
    try:
        first = next(it)
    except StopIteration:
        raise ParseError("empty stream, expected header " + repr(header), 1) from None
    if first.rstrip("\r\n") != header:
        raise ParseError(f"expected header {header!r}, got {first.rstrip()!r}", 1)
    for line_no, raw in enumerate(it, start=2):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 3:
            raise ParseError(f"expected 3 columns, got {len(fields)}", line_no)
        yield line_no, fields


def parse_prices(stream: Iterable[str] | str) -> PricePanel:
    """Parse a prices CSV into a PricePanel with no dividends attached.

    The calendar is the union of all dates seen; a ticker missing on some
    observed date simply has a NaN cell (filter_complete deals with those).

    Raises:
        ParseError: malformed row (column count, date, non-positive price).
        DuplicateKeyError: repeated (date, ticker) key.
    """
    cells: dict[tuple[str, dt.date], float] = {}
    dates: set[dt.date] = set()
    tickers: list[str] = []
    seen_tickers: set[str] = set()
    for line_no, (date_s, ticker_s, close_s) in _rows(stream, PRICES_HEADER):
        date = _parse_date(date_s, line_no)
        ticker = _check_ticker(ticker_s, line_no)
        try:
            close = float(close_s)
        except ValueError:
            raise ParseError(f"non-numeric price {close_s!r}", line_no) from None
        if not np.isfinite(close) or close <= 0.0:
            raise ParseError(f"non-positive price {close_s!r}", line_no)
        key = (ticker, date)
        if key in cells:
            raise DuplicateKeyError(f"line {line_no}: duplicate (date, ticker) = ({date}, {ticker})")
        cells[key] = close
        dates.add(date)
        if ticker not in seen_tickers:
            seen_tickers.add(ticker)
            tickers.append(ticker)  # first-appearance order
    date_list = tuple(sorted(dates))
    grid = np.full((len(tickers), len(date_list)), np.nan)
    date_pos = {d: t for t, d in enumerate(date_list)}
    ticker_pos = {k: i for i, k in enumerate(tickers)}
    for (ticker, date), close in cells.items():
        grid[ticker_pos[ticker], date_pos[date]] = close
    return PricePanel(dates=date_list, tickers=tuple(tickers), prices=grid)


def parse_dividends(stream: Iterable[str] | str, panel: PricePanel) -> PricePanel:
    """Attach dividend events from a dividends CSV to an existing panel.

    Events whose (ticker, date) has no price cell in the panel are rejected:
    a cash dividend is only meaningful on a day the stock actually traded.

    Raises:
        ParseError: malformed row or negative amount.
        UnknownEventError: event references a missing (ticker, date) cell.
    """
    events: dict[tuple[str, dt.date], float] = dict(panel.dividends)
    for line_no, (date_s, ticker_s, amount_s) in _rows(stream, DIVIDENDS_HEADER):
        date = _parse_date(date_s, line_no)
        ticker = _check_ticker(ticker_s, line_no)
        try:
            amount = float(amount_s)
        except ValueError:
            raise ParseError(f"non-numeric amount {amount_s!r}", line_no) from None
        if not np.isfinite(amount) or amount < 0.0:
            raise ParseError(f"negative dividend amount {amount_s!r}", line_no)
        if amount == 0.0:
            continue  # a zero dividend is no event
        if not panel.has_price(ticker, date):
            raise UnknownEventError(
                f"line {line_no}: dividend for ({date}, {ticker}) does not match any price row"
            )
        key = (ticker, date)
        if key in events:
            raise DuplicateKeyError(f"line {line_no}: duplicate dividend for ({date}, {ticker})")
        events[key] = amount
    return PricePanel(dates=panel.dates, tickers=panel.tickers,
                      prices=panel.prices, dividends=events)


def completeness_report(panel: PricePanel) -> dict[str, int]:
    """Missing-day count per incomplete ticker (complete tickers omitted)."""
    report = {}
    for i, ticker in enumerate(panel.tickers):
        missing = int(np.sum(~np.isfinite(panel.prices[i])))
        if missing:
            report[ticker] = missing
    return report


def filter_complete(panel: PricePanel) -> PricePanel:
    """Keep exactly the tickers priced on every date of the panel.

    Idempotent; never alters prices or dividends of retained tickers.
    Use completeness_report() for the dropped tickers and their gap counts.

    Raises:
        EmptyUniverseError: nothing survives the filter.
    """
    keep = [i for i in range(panel.n_assets) if np.all(np.isfinite(panel.prices[i]))]
    if not keep:
        raise EmptyUniverseError("no ticker has a complete price history")
    if len(keep) == panel.n_assets:
        return panel
    tickers = tuple(panel.tickers[i] for i in keep)
    keep_set = set(tickers)
    dividends = {k: v for k, v in panel.dividends.items() if k[0] in keep_set}
    return PricePanel(dates=panel.dates, tickers=tickers,
                      prices=panel.prices[keep], dividends=dividends)


def write_prices_csv(panel: PricePanel) -> str:
    """Serialize prices to the CSV format parse_prices consumes (round-trips)."""
    lines = [PRICES_HEADER]
    for i, ticker in enumerate(panel.tickers):
        for t, date in enumerate(panel.dates):
            close = panel.prices[i, t]
            if np.isfinite(close):
                lines.append(f"{date.isoformat()},{ticker},{float(close)!r}")
    return "\n".join(lines) + "\n"


def write_dividends_csv(panel: PricePanel) -> str:
    """Serialize dividend events to the CSV format parse_dividends consumes."""
    lines = [DIVIDENDS_HEADER]
    for (ticker, date), amount in sorted(panel.dividends.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        lines.append(f"{date.isoformat()},{ticker},{float(amount)!r}")
    return "\n".join(lines) + "\n"
