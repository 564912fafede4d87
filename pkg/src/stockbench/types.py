"""Domain types shared by the engine, data layer, and harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np


class ConfigError(ValueError):
    """An input violates an engine or task contract (never silently clamped)."""


class LoadError(ValueError):
    """An input data file failed validation."""


class AcceptStrategy(Enum):
    """How a warehouse admits arrivals that compete for remaining space.

    UNIFORM_PROPORTIONAL rations space by volume ratio (the built-in default);
    REJECT_ALL admits a step's arrivals only if they all fit; ACCEPT_ALL
    ignores capacity entirely (stock may exceed it, never any overflow cost).
    """

    UNIFORM_PROPORTIONAL = "uniform_proportional"
    REJECT_ALL = "reject_all"
    ACCEPT_ALL = "accept_all"


@dataclass(frozen=True)
class WarehouseConfig:
    capacity: int | None = None  # total volume units; None = unbounded
    accept_strategy: AcceptStrategy = AcceptStrategy.UNIFORM_PROPORTIONAL

    def __post_init__(self):
        if self.capacity is not None and self.capacity <= 0:
            raise ConfigError(f"warehouse capacity must be positive, got {self.capacity}")


# A money parameter is either a scalar (micros) or a grid: (N,) per SKU or
# (T, N) per step and SKU. numpy broadcasting handles all three shapes.


@dataclass(frozen=True)
class CostParams:
    """Per-unit monetary parameters, all in int64 micro-units.

    selling_price / procurement_cost usually alias the series grids; the
    other four come from task cost rules. Scalars broadcast over SKUs.
    """

    selling_price: int | np.ndarray
    procurement_cost: int | np.ndarray
    overflow_cost: int | np.ndarray
    order_cost: int | np.ndarray
    holding_cost: int | np.ndarray
    backlog_cost: int | np.ndarray

    def __post_init__(self):
        for name in ("selling_price", "procurement_cost", "overflow_cost",
                     "order_cost", "holding_cost", "backlog_cost"):
            v = getattr(self, name)
            negative = v < 0 if isinstance(v, (int, np.integer)) else bool((v < 0).any())
            if negative:
                raise ConfigError(f"{name} must be non-negative")

    def row(self, name: str, t: int):
        """Value(s) effective at step t: scalar int or (N,) int64."""
        v = getattr(self, name)
        if isinstance(v, (int, np.integer)):
            return int(v)
        return v[t] if v.ndim == 2 else v


@dataclass
class SkuSeries:
    """Per-SKU time series stacked as (horizon, sku_count) integer grids.

    demand is consumer demand at echelon 0; price/cost are micro-unit money
    grids; lead_time is in steps (0 = delivered at order time by the top
    supplier); volume is one storage-volume figure per SKU.
    """

    demand: np.ndarray
    price: np.ndarray
    cost: np.ndarray
    lead_time: np.ndarray
    volume: np.ndarray

    @property
    def horizon(self) -> int:
        return self.demand.shape[0]

    @property
    def sku_count(self) -> int:
        return self.demand.shape[1]

    def validate(self) -> None:
        t, n = self.demand.shape
        for name in ("price", "cost", "lead_time"):
            if getattr(self, name).shape != (t, n):
                raise ConfigError(f"series '{name}' shape {getattr(self, name).shape} != {(t, n)}")
        if self.volume.shape != (n,):
            raise ConfigError(f"series 'volume' shape {self.volume.shape} != {(n,)}")
        if (self.demand < 0).any():
            raise ConfigError("negative demand in series")
        if (self.lead_time < 0).any():
            raise ConfigError("negative lead time in series")
        if (self.volume <= 0).any():
            raise ConfigError("volumes must be positive")

    def copy(self) -> "SkuSeries":
        return SkuSeries(
            demand=self.demand.copy(),
            price=self.price.copy(),
            cost=self.cost.copy(),
            lead_time=self.lead_time.copy(),
            volume=self.volume.copy(),
        )


@dataclass
class EnvState:
    """Mutable simulation state for M warehouses (echelon 0 faces consumers)
    by N SKUs.

    pending_demand row 0 is overwritten from the demand series each step;
    row i > 0 holds the orders echelon i-1 placed last step. pipeline maps
    arrival step -> (M, N) quantities; in_transit caches its running totals.
    """

    t: int
    inventory: np.ndarray
    pending_demand: np.ndarray
    pipeline: dict[int, np.ndarray] = field(default_factory=dict)
    in_transit: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.in_transit is None:
            self.in_transit = np.zeros_like(self.inventory)

    @property
    def m(self) -> int:
        return self.inventory.shape[0]

    @property
    def n(self) -> int:
        return self.inventory.shape[1]

    def copy(self) -> "EnvState":
        return EnvState(
            t=self.t,
            inventory=self.inventory.copy(),
            pending_demand=self.pending_demand.copy(),
            pipeline={k: v.copy() for k, v in self.pipeline.items()},
            in_transit=self.in_transit.copy(),
        )

    def equal(self, other: "EnvState") -> bool:
        if self.t != other.t:
            return False
        if not np.array_equal(self.inventory, other.inventory):
            return False
        if not np.array_equal(self.pending_demand, other.pending_demand):
            return False
        if not np.array_equal(self.in_transit, other.in_transit):
            return False
        mine = {k: v for k, v in self.pipeline.items() if v.any()}
        theirs = {k: v for k, v in other.pipeline.items() if v.any()}
        if mine.keys() != theirs.keys():
            return False
        return all(np.array_equal(mine[k], theirs[k]) for k in mine)

    def validate(self) -> None:
        if (self.inventory < 0).any():
            raise ConfigError("inventory went negative")
        for arr_t, qty in self.pipeline.items():
            if qty.any() and arr_t <= self.t:
                raise ConfigError(f"pipeline shipment with stale arrival step {arr_t} at t={self.t}")
            if (qty < 0).any():
                raise ConfigError("negative pipeline quantity")


def new_state(m: int, n: int, t: int = 0) -> EnvState:
    """Empty state: no stock, no pipeline, no pending upstream demand."""
    if m < 1 or n < 1:
        raise ConfigError(f"need at least one warehouse and one SKU, got {m}x{n}")
    return EnvState(
        t=t,
        inventory=np.zeros((m, n), dtype=np.int64),
        pending_demand=np.zeros((m, n), dtype=np.int64),
        pipeline={},
        in_transit=np.zeros((m, n), dtype=np.int64),
    )


@dataclass(frozen=True)
class StepRecord:
    """Per-step ledger: physical flows as unit counts, money in micro-units.

    All arrays are (M, N) int64. arrival/received include any same-step
    factory deliveries (zero-lead orders at the top echelon). gamma holds the
    space-rationing ratio per warehouse for the pipeline-arrival gate.
    """

    t: int
    demand: np.ndarray
    sale: np.ndarray
    arrival: np.ndarray
    received: np.ndarray
    order: np.ndarray
    end_inventory: np.ndarray
    end_in_transit: np.ndarray
    gamma: tuple[Fraction, ...]
    gamma_instant: Fraction | None
    income: np.ndarray
    procurement_cost: np.ndarray
    overflow_cost: np.ndarray
    order_cost: np.ndarray
    holding_cost: np.ndarray
    backlog_cost: np.ndarray
    profit: np.ndarray

    @property
    def overflow(self) -> np.ndarray:
        return self.arrival - self.received

    def total_profit_micros(self) -> int:
        return int(self.profit.sum())

    def equal(self, other: "StepRecord") -> bool:
        if self.t != other.t or self.gamma != other.gamma:
            return False
        if self.gamma_instant != other.gamma_instant:
            return False
        fields = (
            "demand", "sale", "arrival", "received", "order", "end_inventory",
            "end_in_transit", "income", "procurement_cost", "overflow_cost",
            "order_cost", "holding_cost", "backlog_cost", "profit",
        )
        return all(np.array_equal(getattr(self, f), getattr(other, f)) for f in fields)
