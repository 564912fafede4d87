"""Vectorized discrete-time simulation core.

One step runs five phases over all (warehouse, SKU) cells at once:

1. Replenish -- the given order matrix is booked. Orders of echelon i < M-1
   become the demand echelon i+1 faces next step. The top echelon buys from
   an unconstrained supplier that ships at order time: quantities enter the
   top pipeline with arrival ``t + lead``, and a zero lead puts them on the
   shelf immediately (before this step's selling).
2. Sell -- every warehouse sells min(demand, on-hand) simultaneously; the
   unmet part is lost and charged the backlog cost. A sale by echelon i+1
   ships to echelon i, arriving ``lead`` steps later (lead sampled now).
3. Arrive -- pipeline shipments whose arrival step is the current step are
   collected.
4. Receive -- each warehouse admits arrivals subject to remaining capacity,
   measured against pre-sell stock. Under the proportional strategy every
   SKU receives floor(arrived * gamma) with gamma = clamp(free/arriving, 0, 1)
   in volume units; rejected units are destroyed at the overflow cost.
5. Update -- inventories move to on-hand - sold + received, pending demand
   rolls forward, and the step ledger (flows plus the six profit components)
   is emitted.

All quantities are int64 and money is fixed-point micro-units, so results
are exact and identical to the scalar reference path bit for bit.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from math import ceil
from typing import Sequence

import numpy as np

from .money import micros_to_decimal
from .types import (
    AcceptStrategy,
    ConfigError,
    CostParams,
    EnvState,
    SkuSeries,
    StepRecord,
    WarehouseConfig,
    new_state,
)

__all__ = ["step", "warmup", "warmup_levels", "profit", "per_echelon_costs", "new_state"]


def per_echelon_costs(costs, m: int) -> tuple[CostParams, ...]:
    if isinstance(costs, CostParams):
        return (costs,) * m
    costs = tuple(costs)
    if len(costs) != m:
        raise ConfigError(f"need {m} per-echelon cost sets, got {len(costs)}")
    return costs


def _money_rows(costs: tuple[CostParams, ...], name: str, t: int, n: int):
    """Resolve a money parameter at step t, shaped to broadcast over (M, N)."""
    first = costs[0]
    if all(c is first for c in costs):
        return first.row(name, t)
    rows = []
    for c in costs:
        r = c.row(name, t)
        rows.append(np.full(n, r, dtype=np.int64) if isinstance(r, int) else r)
    return np.stack(rows)


def _receive_row(arrivals, inventory, volume, wc: WarehouseConfig):
    """Admit one warehouse's arrival row; returns (received, gamma)."""
    denom = int(volume @ arrivals)
    if denom == 0:
        return arrivals.copy(), Fraction(1)
    if wc.capacity is None or wc.accept_strategy is AcceptStrategy.ACCEPT_ALL:
        return arrivals.copy(), Fraction(1)
    free = wc.capacity - int(volume @ inventory)
    if wc.accept_strategy is AcceptStrategy.REJECT_ALL:
        if denom <= max(free, 0):
            return arrivals.copy(), Fraction(1)
        return np.zeros_like(arrivals), Fraction(0)
    if free <= 0:
        return np.zeros_like(arrivals), Fraction(0)
    if free >= denom:
        return arrivals.copy(), Fraction(1)
    return (arrivals * free) // denom, Fraction(free, denom)


def _insert_shipments(pipeline: dict, t: int, lead_row: np.ndarray, qty: np.ndarray) -> None:
    if not qty.any():
        return
    for lead in np.unique(lead_row):
        cols = lead_row == lead
        sub = qty[:, cols]
        if not sub.any():
            continue
        arrive = t + int(lead)
        buf = pipeline.get(arrive)
        if buf is None:
            buf = np.zeros_like(qty)
            pipeline[arrive] = buf
        buf[:, cols] += sub


def _validate_step_inputs(state: EnvState, orders: np.ndarray, series: SkuSeries,
                          warehouses: Sequence[WarehouseConfig]) -> np.ndarray:
    m, n = state.m, state.n
    orders = np.asarray(orders)
    if orders.shape != (m, n):
        raise ConfigError(f"orders shape {orders.shape} does not match state {m}x{n}")
    if not np.issubdtype(orders.dtype, np.integer):
        raise ConfigError(f"orders must be integers, got dtype {orders.dtype}")
    if (orders < 0).any():
        raise ConfigError("negative replenishment order")
    if series.sku_count != n:
        raise ConfigError(f"series has {series.sku_count} SKUs, state has {n}")
    if state.t >= series.horizon:
        raise ConfigError(f"step t={state.t} beyond series horizon {series.horizon}")
    if len(warehouses) != m:
        raise ConfigError(f"need {m} warehouse configs, got {len(warehouses)}")
    return orders.astype(np.int64, copy=True)


def step(state: EnvState, orders, series: SkuSeries, costs,
         warehouses: Sequence[WarehouseConfig]) -> tuple[EnvState, StepRecord]:
    """Advance the state one step in place and return (state, ledger)."""
    orders = _validate_step_inputs(state, orders, series, warehouses)
    m, n = state.m, state.n
    t = state.t
    top = m - 1
    cost_list = per_echelon_costs(costs, m)

    lead_row = series.lead_time[t]
    volume = series.volume
    inv = state.inventory

    demand = state.pending_demand  # detached below; row 0 filled from data
    demand[0, :] = series.demand[t]

    # Replenish: top-echelon purchases ship now; zero-lead units go straight
    # through the space gate onto the shelf, ahead of this step's selling.
    instant_cols = lead_row == 0
    gamma_instant = None
    inst_arrived = None
    inst_received = None
    if instant_cols.any() and orders[top, instant_cols].any():
        inst_arrived = np.where(instant_cols, orders[top], 0)
        inst_received, gamma_instant = _receive_row(inst_arrived, inv[top], volume, warehouses[top])
        inv[top] += inst_received

    # Sell: simultaneous across echelons against start-of-step stock.
    sale = np.minimum(demand, inv)

    # Shipments created this step: echelon i receives what echelon i+1 sold;
    # the top echelon receives its own (lead >= 1) purchases.
    ship = np.empty_like(inv)
    if m > 1:
        ship[:top] = sale[1:]
    ship[top] = np.where(instant_cols, 0, orders[top])
    _insert_shipments(state.pipeline, t, lead_row, ship)
    state.in_transit += ship

    # Arrive.
    arrival = state.pipeline.pop(t, None)
    if arrival is None:
        arrival = np.zeros_like(inv)
    state.in_transit -= arrival

    # Receive: space measured against pre-sell stock.
    received = np.empty_like(arrival)
    gammas = []
    for i in range(m):
        received[i], g = _receive_row(arrival[i], inv[i], volume, warehouses[i])
        gammas.append(g)

    # Update.
    inv += received - sale
    if inst_arrived is not None:
        arrival[top] += inst_arrived
        received[top] += inst_received
    pending = np.zeros_like(demand)
    if m > 1:
        pending[1:] = orders[:top]
    state.pending_demand = pending
    state.t = t + 1

    # Profit components (Eq: income - procurement - overflow - order -
    # holding - backlog), holding charged on end-of-step stock.
    p = _money_rows(cost_list, "selling_price", t, n)
    c = _money_rows(cost_list, "procurement_cost", t, n)
    v = _money_rows(cost_list, "overflow_cost", t, n)
    o = _money_rows(cost_list, "order_cost", t, n)
    h = _money_rows(cost_list, "holding_cost", t, n)
    k = _money_rows(cost_list, "backlog_cost", t, n)

    income = p * sale
    procurement = c * sale
    overflow = v * (arrival - received)
    order_cost = o * (orders > 0)
    holding = h * inv
    backlog = k * (demand - sale)
    profit_m = income - procurement - overflow - order_cost - holding - backlog

    record = StepRecord(
        t=t,
        demand=demand,
        sale=sale,
        arrival=arrival,
        received=received,
        order=orders,
        end_inventory=inv.copy(),
        end_in_transit=state.in_transit.copy(),
        gamma=tuple(gammas),
        gamma_instant=gamma_instant,
        income=income,
        procurement_cost=procurement,
        overflow_cost=overflow,
        order_cost=order_cost,
        holding_cost=holding,
        backlog_cost=backlog,
        profit=profit_m,
    )
    return state, record


def profit(demand: int, sale: int, arrival: int, received: int, order: int,
           end_inventory: int, costs: CostParams, t: int = 0,
           sku: int | None = None) -> Decimal:
    """Exact one-cell profit for given flows; money args resolved at step t."""
    if min(demand, sale, arrival, received, order, end_inventory) < 0:
        raise ConfigError("flow quantities must be non-negative")
    if sale > demand or received > arrival:
        raise ConfigError("sale must not exceed demand nor received exceed arrival")

    def at(name):
        v = costs.row(name, t)
        if isinstance(v, int):
            return v
        return int(v[sku if sku is not None else 0])

    micros = (
        at("selling_price") * sale
        - at("procurement_cost") * sale
        - at("overflow_cost") * (arrival - received)
        - at("order_cost") * (1 if order > 0 else 0)
        - at("holding_cost") * end_inventory
        - at("backlog_cost") * (demand - sale)
    )
    return micros_to_decimal(micros)


def warmup_levels(series: SkuSeries, start: int, length: int) -> np.ndarray:
    """Order-up-to levels for the built-in warmup rule: per SKU,
    ceil(mean demand * (mean lead + 1)) over the window [start, start+length).
    Exact integer arithmetic so every caller derives identical levels."""
    if length <= 0:
        return np.zeros(series.sku_count, dtype=np.int64)
    d_sum = series.demand[start:start + length].sum(axis=0)
    l_sum = series.lead_time[start:start + length].sum(axis=0)
    num = d_sum.astype(object) * (l_sum.astype(object) + length)
    den = length * length
    return np.asarray([int(ceil(Fraction(int(a), den))) for a in num], dtype=np.int64)


def warmup(state: EnvState, series: SkuSeries, costs, warehouses,
           length: int, levels: np.ndarray | None = None,
           collect: bool = False):
    """Advance ``length`` steps under the built-in order-up-to rule,
    discarding profit. Returns the warmed state, plus the step records when
    ``collect`` is set (they seed demand histories for observations)."""
    if length < 0:
        raise ConfigError("warmup length must be >= 0")
    if levels is None:
        levels = warmup_levels(series, state.t, length)
    m = state.m
    records = [] if collect else None
    for _ in range(length):
        position = state.inventory + state.in_transit
        if m > 1:
            # Orders placed last step are still pending at the upstream.
            position[:-1] += state.pending_demand[1:]
        orders = np.maximum(levels[None, :] - position, 0)
        state, rec = step(state, orders, series, costs, warehouses)
        if collect:
            records.append(rec)
    if collect:
        return state, records
    return state
