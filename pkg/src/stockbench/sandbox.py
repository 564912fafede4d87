"""Capacity-free single-warehouse simulator, vectorized over rule candidates.

The policy solvers score hundreds of candidate parameter sets per SKU by
replaying the same demand window under each. This module runs that replay
with state arrays shaped (sku, candidate), using the exact integer semantics
of the engine's top echelon with unbounded space: purchases ship at order
time, zero-lead units are sellable the same step, arrivals otherwise become
sellable the step after they land, and holding is charged on end-of-step
stock. On any single-echelon window where capacity never binds, its per-SKU
profits match the full engine bit for bit (tested).
"""

from __future__ import annotations

import numpy as np

from .engine import warmup_levels
from .tasks import SeriesRange
from .types import ConfigError, SkuSeries

FULL_OBJECTIVE = ("income", "procurement", "order", "holding", "backlog")
STOCK_OBJECTIVE = ("income", "procurement", "holding")  # solver program terms


def _warm_series(view: SeriesRange) -> np.ndarray:
    if view.warmup == 0:
        return np.zeros(view.sku_count, dtype=np.int64)
    series = SkuSeries(demand=view.demand, price=view.price, cost=view.cost,
                       lead_time=view.lead_time, volume=view.volume)
    return warmup_levels(series, 0, view.warmup)


def simulate_candidates(view: SeriesRange, rule, objective=FULL_OBJECTIVE,
                        candidates: int | None = None) -> np.ndarray:
    """Total profit (sku, candidate) of ``rule`` over the view's evaluation
    range, starting from the built-in warmup run on the lead-in rows.

    ``rule(position, t)`` maps the (sku, candidate) inventory position at
    relative step t to non-negative integer orders.
    """
    n = view.sku_count
    horizon = view.demand.shape[0]
    if horizon == view.warmup:
        raise ConfigError("empty evaluation range")
    max_lead = int(view.lead_time.max(initial=0))
    size = max_lead + 1

    warm_z = _warm_series(view)[:, None]
    inv = np.zeros((n, 1), dtype=np.int64)
    transit = np.zeros((n, 1), dtype=np.int64)
    pipe = np.zeros((size, n, 1), dtype=np.int64)
    profit = None
    rows = np.arange(n)

    use_income = "income" in objective
    use_proc = "procurement" in objective
    use_order = "order" in objective
    use_hold = "holding" in objective
    use_back = "backlog" in objective

    for t in range(horizon):
        warm_phase = t < view.warmup
        if not warm_phase and profit is None:
            # fan the warmed state out across candidates
            k = candidates if candidates is not None else rule(inv + transit, t).shape[1]
            inv = np.repeat(inv, k, axis=1)
            transit = np.repeat(transit, k, axis=1)
            pipe = np.repeat(pipe, k, axis=2)
            profit = np.zeros((n, k), dtype=np.int64)

        position = inv + transit
        if warm_phase:
            orders = np.maximum(warm_z - position, 0)
        else:
            orders = rule(position, t)

        lead = view.lead_time[t]
        instant = lead == 0
        if instant.any():
            inv[instant] += orders[instant]
        pending = np.where(instant[:, None], 0, orders)
        if pending.any():
            pipe[(t + lead) % size, rows] += pending
            transit += pending

        demand = view.demand[t][:, None]
        sale = np.minimum(demand, inv)
        arrived = pipe[t % size].copy()
        if arrived.any():
            pipe[t % size] = 0
            transit -= arrived
        inv += arrived - sale

        if not warm_phase:
            d = np.zeros_like(profit)
            if use_income:
                d += view.money_row("price", t)[:, None] * sale
            if use_proc:
                d -= view.money_row("cost", t)[:, None] * sale
            if use_order:
                o = view.money_row("order_cost", t)
                o = o if isinstance(o, int) else o[:, None]
                d -= o * (orders > 0)
            if use_hold:
                h = view.money_row("holding_cost", t)
                h = h if isinstance(h, int) else h[:, None]
                d -= h * inv
            if use_back:
                k_unit = view.money_row("backlog_cost", t)
                k_unit = k_unit if isinstance(k_unit, int) else k_unit[:, None]
                d -= k_unit * (demand - sale)
            profit += d

    assert profit is not None
    return profit
