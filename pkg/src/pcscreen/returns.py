"""Dividend-adjusted prices and simple returns.

The adjustment reinvests each cash dividend on its pay date: the daily
factor is 1 + D(t)/P(t) with P(t) the same-day close, the cumulative
factor is the running product, and the adjusted price is
PNEW(t) = P(t) * CumulativeFactor(t). Returns are forward-indexed simple
returns of the adjusted series:

    R(t) = (PNEW(t+1) - PNEW(t)) / PNEW(t),   t = 1 .. T-1

so the return at index t spans date t -> t+1 and is labelled with its
start date. Division by the same-day close (not the prior close) is an
unusual convention but is kept deliberately; no alternative is exposed.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientHistoryError
from .panel import PricePanel


@dataclass(frozen=True)
class ReturnPanel:
    """Returns grid plus the adjusted prices it was derived from.

    dates has length T-1 (start-date convention); price_dates has length T
    and matches adjusted_prices. returns is (p, T-1), adjusted_prices (p, T).
    """

    dates: tuple[dt.date, ...]
    price_dates: tuple[dt.date, ...]
    tickers: tuple[str, ...]
    returns: np.ndarray
    adjusted_prices: np.ndarray

    def __post_init__(self):
        p, t = self.adjusted_prices.shape
        if self.returns.shape != (p, t - 1):
            raise ValueError("returns grid must be (p, T-1)")
        if len(self.dates) != t - 1 or len(self.price_dates) != t:
            raise ValueError("date lists do not match grid shapes")
        if np.any(self.adjusted_prices <= 0):
            raise ValueError("adjusted prices must be positive")

    @property
    def n_assets(self) -> int:
        return len(self.tickers)

    @property
    def n_obs(self) -> int:
        return self.returns.shape[1]

    def ticker_index(self, ticker: str) -> int:
        try:
            return self.tickers.index(ticker)
        except ValueError:
            raise KeyError(f"unknown ticker {ticker!r}") from None


def dividend_factors(panel: PricePanel, ticker: str) -> np.ndarray:
    """Cumulative dividend factors for one ticker, length T.

    Daily factor is 1 on dividend-free days and 1 + D(t)/P(t) on pay dates;
    the cumulative factor is the running product starting at the first day's
    own factor. Non-decreasing since dividends are non-negative.
    """
    i = panel.ticker_index(ticker)
    prices = panel.prices[i]
    if not np.all(np.isfinite(prices)):
        raise ValueError(f"ticker {ticker!r} has missing prices; filter the panel first")
    daily = np.ones(panel.n_days)
    for t, date in enumerate(panel.dates):
        amount = panel.dividends.get((ticker, date))
        if amount:
            daily[t] = 1.0 + amount / prices[t]
    return np.cumprod(daily)


def adjust_prices(panel: PricePanel, ticker: str) -> np.ndarray:
    """Adjusted price series PNEW(t) = P(t) * CumulativeFactor(t), length T."""
    i = panel.ticker_index(ticker)
    return panel.prices[i] * dividend_factors(panel, ticker)


def compute_returns(panel: PricePanel) -> ReturnPanel:
    """Build the full return panel from a complete price panel.

    Raises:
        InsufficientHistoryError: fewer than 3 price dates (a correlation
            needs at least 2 return observations).
        ValueError: panel has missing prices (run filter_complete first).
    """
    if panel.n_days < 3:
        raise InsufficientHistoryError(
            f"need at least 3 price dates, got {panel.n_days}"
        )
    pnew = np.empty_like(panel.prices)
    for i, ticker in enumerate(panel.tickers):
        pnew[i] = adjust_prices(panel, ticker)
    rets = (pnew[:, 1:] - pnew[:, :-1]) / pnew[:, :-1]
    return ReturnPanel(
        dates=panel.dates[:-1],
        price_dates=panel.dates,
        tickers=panel.tickers,
        returns=rets,
        adjusted_prices=pnew,
    )


def write_adjusted_prices_csv(rp: ReturnPanel) -> str:
    """Audit dump: ``date,ticker,pnew`` for every cell."""
    lines = ["date,ticker,pnew"]
    for i, ticker in enumerate(rp.tickers):
        for t, date in enumerate(rp.price_dates):
            lines.append(f"{date.isoformat()},{ticker},{float(rp.adjusted_prices[i, t])!r}")
    return "\n".join(lines) + "\n"


def write_returns_csv(rp: ReturnPanel) -> str:
    """Audit dump: ``date,ticker,return`` (start-date convention)."""
    lines = ["date,ticker,return"]
    for i, ticker in enumerate(rp.tickers):
        for t, date in enumerate(rp.dates):
            lines.append(f"{date.isoformat()},{ticker},{float(rp.returns[i, t])!r}")
    return "\n".join(lines) + "\n"
