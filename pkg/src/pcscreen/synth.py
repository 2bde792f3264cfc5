"""Seeded synthetic markets with planted correlation structure.

Returns follow a one-factor model, r_i(t) = s * (beta_i * m(t) + sigma_i *
eps_i(t)), with independent standard normal shocks and a global scale s
keeping daily moves realistic (correlations are scale-invariant, so s only
protects price positivity). A planted pair rewires the second member's
shock to rho* * eps_anchor + sqrt(1 - rho*^2) * eps_own, with rho* solved
so the total return correlation hits the target after accounting for the
shared market exposure; plants of three or more members mix one common
component into every member instead, which makes the group exchangeable.
Plant members inherit the anchor's beta and sigma (negated beta for
negative targets) so that any |target| <= 1 stays feasible.

Prices integrate the returns from base_price on a synthetic weekday
calendar. Everything is a pure function of the spec, seed included:
the same spec yields bit-identical panels.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SynthSpecError
from .panel import PricePanel

_CALENDAR_EPOCH = dt.date(2010, 1, 4)  # a Monday

GENERATOR_METADATA = {
    "prng": "numpy.random.default_rng (PCG64)",
    "normals": "numpy standard_normal (ziggurat rejection sampling, exact)",
    "model": "returns = scale * (beta * market + sigma * shock); plants rewire shocks",
}


@dataclass(frozen=True)
class Plant:
    """One planted relationship.

    members are stock indices; the first is the anchor. target_corr is the
    pairwise return correlation aimed at between the anchor and each other
    member (and, for plants of 3+, between all members via the shared
    component). start_day/end_day bound the affected return observations
    [start, end); None means the full sample.
    """

    members: tuple[int, ...]
    target_corr: float
    start_day: Optional[int] = None
    end_day: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(int(m) for m in self.members))


@dataclass(frozen=True)
class DividendEvent:
    day: int      # price-date index
    stock: int
    amount: float


@dataclass(frozen=True)
class SynthSpec:
    """Full description of a synthetic market; the seed pins every draw."""

    seed: int
    n_days: int
    n_stocks: int
    market_beta_range: tuple[float, float] = (0.3, 0.7)
    idio_vol_range: tuple[float, float] = (0.6, 1.0)
    plants: tuple[Plant, ...] = ()
    base_price: float = 100.0
    return_scale: float = 0.01
    dividends: tuple[DividendEvent, ...] = ()

    def validate(self) -> None:
        if self.n_stocks < 2:
            raise SynthSpecError("n_stocks must be >= 2")
        if self.n_days < 3:
            raise SynthSpecError("n_days must be >= 3")
        lo, hi = self.market_beta_range
        if lo > hi:
            raise SynthSpecError("market_beta_range must be (low, high)")
        lo, hi = self.idio_vol_range
        if not (0.0 <= lo <= hi):
            raise SynthSpecError("idio_vol_range must be (low, high) with low >= 0")
        if self.base_price <= 0:
            raise SynthSpecError("base_price must be positive")
        if self.return_scale <= 0:
            raise SynthSpecError("return_scale must be positive")
        n_obs = self.n_days - 1
        for k, plant in enumerate(self.plants):
            if len(plant.members) < 2:
                raise SynthSpecError(f"plant {k}: needs at least 2 members")
            if len(set(plant.members)) != len(plant.members):
                raise SynthSpecError(f"plant {k}: repeated member")
            if any(not 0 <= m < self.n_stocks for m in plant.members):
                raise SynthSpecError(f"plant {k}: member index out of range")
            if not -1.0 < plant.target_corr <= 1.0:
                raise SynthSpecError(f"plant {k}: target_corr must be in (-1, 1]")
            if plant.target_corr < 0 and len(plant.members) > 2:
                raise SynthSpecError(
                    f"plant {k}: a group of 3+ cannot be mutually negatively correlated"
                )
            start = 0 if plant.start_day is None else plant.start_day
            end = n_obs if plant.end_day is None else plant.end_day
            if not 0 <= start < end <= n_obs:
                raise SynthSpecError(f"plant {k}: invalid day window [{start}, {end})")
        for e in self.dividends:
            if not 0 <= e.day < self.n_days:
                raise SynthSpecError(f"dividend event day {e.day} out of range")
            if not 0 <= e.stock < self.n_stocks:
                raise SynthSpecError(f"dividend event stock {e.stock} out of range")
            if e.amount < 0:
                raise SynthSpecError("dividend amount must be non-negative")


def trading_dates(n_days: int, start: dt.date = _CALENDAR_EPOCH) -> tuple[dt.date, ...]:
    """n_days consecutive weekdays starting at ``start``."""
    out = []
    d = start
    while len(out) < n_days:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return tuple(out)


def ticker_name(i: int, n_stocks: int) -> str:
    width = len(str(n_stocks - 1))
    return f"S{i:0{width}d}"


def _pair_mixing(beta_a, sigma_a, beta_b, sigma_b, target, label):
    """Solve corr(r_a, r_b) = target for the shock-mixing coefficient."""
    va = beta_a * beta_a + sigma_a * sigma_a
    vb = beta_b * beta_b + sigma_b * sigma_b
    if va == 0.0 or vb == 0.0:
        raise SynthSpecError(f"{label}: member has zero total variance")
    if sigma_a == 0.0 or sigma_b == 0.0:
        achieved = beta_a * beta_b / math.sqrt(va * vb)
        if abs(achieved - target) <= 1e-12:
            return 0.0
        raise SynthSpecError(
            f"{label}: zero idiosyncratic volatility pins the correlation at "
            f"{achieved:.6f}, target {target} is infeasible"
        )
    rho = (target * math.sqrt(va * vb) - beta_a * beta_b) / (sigma_a * sigma_b)
    if abs(rho) > 1.0 + 1e-12:
        raise SynthSpecError(
            f"{label}: target correlation {target} needs shock mixing "
            f"{rho:.4f} outside [-1, 1] after the shared market exposure"
        )
    return min(1.0, max(-1.0, rho))


def generate(spec: SynthSpec) -> PricePanel:
    """Build the price panel for a spec. Deterministic for a fixed seed.

    Raises:
        SynthSpecError: invalid spec, infeasible plant target, or a price
            driven non-positive (lower return_scale).
    """
    spec.validate()
    p, n_obs = spec.n_stocks, spec.n_days - 1
    rng = np.random.default_rng(spec.seed)
    beta = rng.uniform(*spec.market_beta_range, size=p)
    sigma = rng.uniform(*spec.idio_vol_range, size=p)
    market = rng.standard_normal(n_obs)
    shocks = rng.standard_normal((p, n_obs))

    for k, plant in enumerate(spec.plants):
        label = f"plant {k} {plant.members}"
        anchor = plant.members[0]
        sl = slice(plant.start_day, plant.end_day)
        for b in plant.members[1:]:
            beta[b] = beta[anchor] if plant.target_corr >= 0 else -beta[anchor]
            sigma[b] = sigma[anchor]
        if len(plant.members) == 2:
            b = plant.members[1]
            rho = _pair_mixing(beta[anchor], sigma[anchor], beta[b], sigma[b],
                               plant.target_corr, label)
            shocks[b, sl] = rho * shocks[anchor, sl] + math.sqrt(1.0 - rho * rho) * shocks[b, sl]
        else:
            v = beta[anchor] ** 2 + sigma[anchor] ** 2
            if sigma[anchor] == 0.0:
                raise SynthSpecError(f"{label}: group plant needs idiosyncratic volatility")
            c = (plant.target_corr * v - beta[anchor] ** 2) / sigma[anchor] ** 2
            if not -1e-12 <= c <= 1.0 + 1e-12:
                raise SynthSpecError(
                    f"{label}: target correlation {plant.target_corr} needs shared-component "
                    f"weight {c:.4f} outside [0, 1]"
                )
            c = min(1.0, max(0.0, c))
            common = rng.standard_normal(n_obs)
            for b in plant.members:
                shocks[b, sl] = math.sqrt(c) * common[sl] + math.sqrt(1.0 - c) * shocks[b, sl]

    returns = spec.return_scale * (beta[:, None] * market[None, :] + sigma[:, None] * shocks)
    growth = 1.0 + returns
    if np.any(growth <= 0.0):
        raise SynthSpecError(
            "generated a return at or below -100%; lower return_scale or volatilities"
        )
    prices = np.empty((p, spec.n_days))
    prices[:, 0] = spec.base_price
    prices[:, 1:] = spec.base_price * np.cumprod(growth, axis=1)

    dates = trading_dates(spec.n_days)
    tickers = tuple(ticker_name(i, p) for i in range(p))
    dividends = {}
    for e in spec.dividends:
        if e.amount > 0:
            dividends[(tickers[e.stock], dates[e.day])] = float(e.amount)
    return PricePanel(dates=dates, tickers=tickers, prices=prices, dividends=dividends)


def answer_key(spec: SynthSpec) -> dict:
    """The ground truth a detector run on this market should recover."""
    p = spec.n_stocks
    return {
        "spec": spec_to_dict(spec),
        "tickers": [ticker_name(i, p) for i in range(p)],
        "planted_groups": [
            {
                "members": [ticker_name(m, p) for m in plant.members],
                "target_corr": plant.target_corr,
                "start_day": plant.start_day,
                "end_day": plant.end_day,
            }
            for plant in spec.plants
        ],
        "generator": GENERATOR_METADATA,
    }


def spec_to_dict(spec: SynthSpec) -> dict:
    return {
        "seed": spec.seed,
        "n_days": spec.n_days,
        "n_stocks": spec.n_stocks,
        "market_beta_range": list(spec.market_beta_range),
        "idio_vol_range": list(spec.idio_vol_range),
        "base_price": spec.base_price,
        "return_scale": spec.return_scale,
        "plants": [
            {
                "members": list(plant.members),
                "target_corr": plant.target_corr,
                "start_day": plant.start_day,
                "end_day": plant.end_day,
            }
            for plant in spec.plants
        ],
        "dividends": [
            {"day": e.day, "stock": e.stock, "amount": e.amount}
            for e in spec.dividends
        ],
    }


def spec_from_dict(data: dict) -> SynthSpec:
    """Parse a spec from its JSON dict form; raises SynthSpecError on junk."""
    try:
        plants = tuple(
            Plant(
                members=tuple(p["members"]),
                target_corr=float(p["target_corr"]),
                start_day=p.get("start_day"),
                end_day=p.get("end_day"),
            )
            for p in data.get("plants", ())
        )
        dividends = tuple(
            DividendEvent(day=int(e["day"]), stock=int(e["stock"]), amount=float(e["amount"]))
            for e in data.get("dividends", ())
        )
        spec = SynthSpec(
            seed=int(data["seed"]),
            n_days=int(data["n_days"]),
            n_stocks=int(data["n_stocks"]),
            market_beta_range=tuple(data.get("market_beta_range", (0.3, 0.7))),
            idio_vol_range=tuple(data.get("idio_vol_range", (0.6, 1.0))),
            plants=plants,
            base_price=float(data.get("base_price", 100.0)),
            return_scale=float(data.get("return_scale", 0.01)),
            dividends=dividends,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SynthSpecError(f"malformed synth spec: {exc}") from exc
    spec.validate()
    return spec


def spec_from_json(text: str) -> SynthSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SynthSpecError(f"spec is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SynthSpecError("spec JSON must be an object")
    return spec_from_dict(data)
