"""Seeded synthetic SKU series.

Default profile: per-SKU Poisson demand with rate drawn uniformly from
[2, 20], prices a 1.5-3x markup over a cent-valued base cost, and a constant
per-SKU lead time in 1..7. Everything is driven by one numpy Generator, so a
seed fully determines the output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import ConfigError, SkuSeries

CENT = 10_000  # micro-units per hundredth of currency


@dataclass(frozen=True)
class SyntheticProfile:
    demand_rate_range: tuple[float, float] = (2.0, 20.0)
    cost_range_cents: tuple[int, int] = (100, 2000)
    markup_range: tuple[float, float] = (1.5, 3.0)
    lead_time_range: tuple[int, int] = (1, 7)
    volume: int = 1
    # heavy-tail option: rare additive bursts on top of the Poisson base,
    # mimicking promotion-driven retail spikes
    spike_probability: float = 0.0
    spike_range: tuple[int, int] = (20, 60)


def generate_synthetic(seed: int, sku_count: int, horizon: int,
                       profile: SyntheticProfile | None = None) -> SkuSeries:
    if horizon <= 0:
        raise ConfigError("horizon must be positive")
    if sku_count <= 0:
        raise ConfigError("sku_count must be positive")
    profile = profile or SyntheticProfile()
    rng = np.random.default_rng(seed)

    rates = rng.uniform(*profile.demand_rate_range, size=sku_count)
    demand = rng.poisson(rates, size=(horizon, sku_count)).astype(np.int64)
    if profile.spike_probability > 0:
        hits = rng.random(size=demand.shape) < profile.spike_probability
        bursts = rng.integers(profile.spike_range[0], profile.spike_range[1] + 1,
                              size=demand.shape)
        demand += hits * bursts

    cost_cents = rng.integers(profile.cost_range_cents[0], profile.cost_range_cents[1] + 1,
                              size=sku_count)
    markup = rng.uniform(*profile.markup_range, size=sku_count)
    price_cents = np.ceil(cost_cents * markup).astype(np.int64)

    lo, hi = profile.lead_time_range
    lead = rng.integers(lo, hi + 1, size=sku_count)

    ones = np.ones((horizon, 1), dtype=np.int64)
    return SkuSeries(
        demand=demand,
        price=ones * (price_cents * CENT),
        cost=ones * (cost_cents * CENT),
        lead_time=ones * lead,
        volume=np.full(sku_count, profile.volume, dtype=np.int64),
    )
