"""Scalar reference path for the simulation step.

Same contract as the matrix engine, but computed cell by cell with plain
Python integers and no shared intermediate buffers. It exists purely as a
correctness oracle: for any input, its outputs must match the vectorized
path bit for bit.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .engine import _validate_step_inputs, per_echelon_costs
from .types import (
    AcceptStrategy,
    CostParams,
    EnvState,
    SkuSeries,
    StepRecord,
    WarehouseConfig,
)

__all__ = ["step_scalar_reference"]


def _cost_at(cp: CostParams, name: str, t: int, j: int) -> int:
    v = getattr(cp, name)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if v.ndim == 2:
        return int(v[t, j])
    return int(v[j])


def _gate(arrivals: list[int], inventory: list[int], volume: list[int],
          wc: WarehouseConfig) -> tuple[list[int], Fraction]:
    denom = sum(volume[j] * arrivals[j] for j in range(len(arrivals)))
    if denom == 0:
        return list(arrivals), Fraction(1)
    if wc.capacity is None or wc.accept_strategy is AcceptStrategy.ACCEPT_ALL:
        return list(arrivals), Fraction(1)
    free = wc.capacity - sum(volume[j] * inventory[j] for j in range(len(inventory)))
    if wc.accept_strategy is AcceptStrategy.REJECT_ALL:
        if denom <= max(free, 0):
            return list(arrivals), Fraction(1)
        return [0] * len(arrivals), Fraction(0)
    if free <= 0:
        return [0] * len(arrivals), Fraction(0)
    if free >= denom:
        return list(arrivals), Fraction(1)
    return [(arrivals[j] * free) // denom for j in range(len(arrivals))], Fraction(free, denom)


def step_scalar_reference(state: EnvState, orders, series: SkuSeries, costs,
                          warehouses: Sequence[WarehouseConfig]) -> tuple[EnvState, StepRecord]:
    orders = _validate_step_inputs(state, orders, series, warehouses)
    m, n = state.m, state.n
    t = state.t
    top = m - 1
    cost_list = per_echelon_costs(costs, m)

    lead = [int(x) for x in series.lead_time[t]]
    volume = [int(x) for x in series.volume]
    inv = [[int(state.inventory[i, j]) for j in range(n)] for i in range(m)]
    R = [[int(orders[i, j]) for j in range(n)] for i in range(m)]

    demand = [[0] * n for _ in range(m)]
    for j in range(n):
        demand[0][j] = int(series.demand[t, j])
    for i in range(1, m):
        for j in range(n):
            demand[i][j] = int(state.pending_demand[i, j])

    pipeline = {arr: [[int(q[i, j]) for j in range(n)] for i in range(m)]
                for arr, q in state.pipeline.items()}

    # Replenish: zero-lead top-echelon purchases are delivered now.
    gamma_instant = None
    inst_arrived = [0] * n
    inst_received = [0] * n
    if any(lead[j] == 0 and R[top][j] > 0 for j in range(n)):
        inst_arrived = [R[top][j] if lead[j] == 0 else 0 for j in range(n)]
        inst_received, gamma_instant = _gate(inst_arrived, inv[top], volume, warehouses[top])
        for j in range(n):
            inv[top][j] += inst_received[j]

    # Sell.
    sale = [[min(demand[i][j], inv[i][j]) for j in range(n)] for i in range(m)]

    # Ship: downstream receivables from upstream sales; top from the factory.
    for i in range(m):
        for j in range(n):
            qty = sale[i + 1][j] if i < top else (0 if lead[j] == 0 else R[top][j])
            if qty:
                arr = t + lead[j]
                if arr not in pipeline:
                    pipeline[arr] = [[0] * n for _ in range(m)]
                pipeline[arr][i][j] += qty

    # Arrive.
    arrived = pipeline.pop(t, [[0] * n for _ in range(m)])

    # Receive.
    received = []
    gammas = []
    for i in range(m):
        got, g = _gate(arrived[i], inv[i], volume, warehouses[i])
        received.append(got)
        gammas.append(g)

    # Update.
    for i in range(m):
        for j in range(n):
            inv[i][j] += received[i][j] - sale[i][j]
    for j in range(n):
        arrived[top][j] += inst_arrived[j]
        received[top][j] += inst_received[j]

    in_transit = [[0] * n for _ in range(m)]
    for q in pipeline.values():
        for i in range(m):
            for j in range(n):
                in_transit[i][j] += q[i][j]

    pending = [[0] * n for _ in range(m)]
    for i in range(1, m):
        for j in range(n):
            pending[i][j] = R[i - 1][j]

    money = {name: [[0] * n for _ in range(m)] for name in
             ("income", "procurement", "overflow", "order", "holding", "backlog", "profit")}
    for i in range(m):
        cp = cost_list[i]
        for j in range(n):
            p = _cost_at(cp, "selling_price", t, j)
            c = _cost_at(cp, "procurement_cost", t, j)
            v = _cost_at(cp, "overflow_cost", t, j)
            o = _cost_at(cp, "order_cost", t, j)
            h = _cost_at(cp, "holding_cost", t, j)
            k = _cost_at(cp, "backlog_cost", t, j)
            money["income"][i][j] = p * sale[i][j]
            money["procurement"][i][j] = c * sale[i][j]
            money["overflow"][i][j] = v * (arrived[i][j] - received[i][j])
            money["order"][i][j] = o * (1 if R[i][j] > 0 else 0)
            money["holding"][i][j] = h * inv[i][j]
            money["backlog"][i][j] = k * (demand[i][j] - sale[i][j])
            money["profit"][i][j] = (
                money["income"][i][j] - money["procurement"][i][j]
                - money["overflow"][i][j] - money["order"][i][j]
                - money["holding"][i][j] - money["backlog"][i][j]
            )

    def grid(rows) -> np.ndarray:
        return np.array(rows, dtype=np.int64)

    state.t = t + 1
    state.inventory = grid(inv)
    state.pending_demand = grid(pending)
    state.pipeline = {arr: grid(q) for arr, q in pipeline.items()}
    state.in_transit = grid(in_transit)

    record = StepRecord(
        t=t,
        demand=grid(demand),
        sale=grid(sale),
        arrival=grid(arrived),
        received=grid(received),
        order=grid(R),
        end_inventory=state.inventory.copy(),
        end_in_transit=state.in_transit.copy(),
        gamma=tuple(gammas),
        gamma_instant=gamma_instant,
        income=grid(money["income"]),
        procurement_cost=grid(money["procurement"]),
        overflow_cost=grid(money["overflow"]),
        order_cost=grid(money["order"]),
        holding_cost=grid(money["holding"]),
        backlog_cost=grid(money["backlog"]),
        profit=grid(money["profit"]),
    )
    return state, record
