"""Replenishment policies: order-up-to (base stock) and (s, S) rules, their
per-SKU simulation-search solvers, and the trivial baselines.

Solvers score each candidate level by replaying the given demand window in
the capacity-free sandbox, one independent search per SKU. Base stock levels
maximize income - procurement - holding over an integer grid 0..30x mean
demand (pruned by demand quantiles); (s, S) pairs maximize full profit over
multiples {0, 0.5, ..., 12} of mean demand with s <= S. Ties break toward
the smaller level (and for pairs toward smaller S, then smaller s). The
searches deliberately ignore warehouse capacity; the solved parameters then
run in the capacity-constrained engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

from .sandbox import FULL_OBJECTIVE, STOCK_OBJECTIVE, simulate_candidates
from .tasks import MaterializedTask, SeriesRange
from .types import ConfigError, EnvState

__all__ = [
    "base_stock_order", "ss_order", "base_stock_grid", "ss_grid",
    "solve_base_stock", "solve_ss", "NeverPolicy", "BaseStockPolicy",
    "SsPolicy", "make_policy",
]


def base_stock_order(level, inventory, in_transit):
    """Order whatever restores the inventory position to ``level``."""
    level = np.asarray(level)
    if (level < 0).any():
        raise ConfigError("base stock level must be non-negative")
    return np.maximum(level - inventory - in_transit, 0)


def ss_order(reorder, up_to, inventory, in_transit):
    """Order up to ``up_to`` once the position falls to ``reorder`` or below."""
    reorder, up_to = np.asarray(reorder), np.asarray(up_to)
    if (reorder > up_to).any():
        raise ConfigError("reorder point s must not exceed order-up-to level S")
    if (reorder < 0).any():
        raise ConfigError("(s, S) levels must be non-negative")
    position = inventory + in_transit
    return np.where(position <= reorder, up_to - position, 0)


def _range_demand_stats(view: SeriesRange):
    d = view.demand[view.warmup:]
    return d.sum(axis=0, dtype=np.int64), d.shape[0]


def base_stock_grid(view: SeriesRange) -> np.ndarray:
    """Per-SKU candidate levels (sku, k), ascending, padded by repeating the
    largest level so every row has equal width."""
    d = view.demand[view.warmup:]
    total, steps = _range_demand_stats(view)
    q99 = np.quantile(d, 0.99, axis=0)
    max_lead = view.lead_time[view.warmup:].max(axis=0)
    caps = []
    for j in range(view.sku_count):
        mean_cap = ceil(30 * total[j] / steps) if total[j] else 0
        prune_cap = ceil(float(q99[j]) * (int(max_lead[j]) + 2))
        caps.append(min(mean_cap, max(prune_cap, 1)) if total[j] else 0)
    width = max(caps) + 1
    grid = np.empty((view.sku_count, width), dtype=np.int64)
    for j, cap in enumerate(caps):
        grid[j, :cap + 1] = np.arange(cap + 1)
        grid[j, cap + 1:] = cap
    return grid


SS_FACTOR_HALVES = tuple(range(25))  # 0, 0.5, ..., 12 in half units


def ss_grid(view: SeriesRange) -> tuple[np.ndarray, np.ndarray]:
    """All (s, S) pairs with s <= S from levels {0, 0.5, ..., 12} x mean
    demand, ordered by S then s ascending: arrays (sku, 325)."""
    total, steps = _range_demand_stats(view)
    levels = np.empty((view.sku_count, len(SS_FACTOR_HALVES)), dtype=np.int64)
    for idx, halves in enumerate(SS_FACTOR_HALVES):
        # round-half-up of (halves/2) * (total/steps), in exact integers
        num = halves * total.astype(object)
        den = 2 * steps
        levels[:, idx] = np.asarray([(int(a) * 2 + den) // (2 * den) for a in num])
    pairs_s, pairs_up = [], []
    for hi in range(len(SS_FACTOR_HALVES)):
        for lo in range(hi + 1):
            pairs_s.append(levels[:, lo])
            pairs_up.append(levels[:, hi])
    return np.stack(pairs_s, axis=1), np.stack(pairs_up, axis=1)


def solve_base_stock(view: SeriesRange, grid: np.ndarray | None = None) -> np.ndarray:
    """Best order-up-to level per SKU on the view's evaluation range."""
    if view.length <= 0:
        raise ConfigError("evaluation range is empty")
    grid = base_stock_grid(view) if grid is None else np.asarray(grid, dtype=np.int64)
    profits = simulate_candidates(
        view, lambda pos, t: np.maximum(grid - pos, 0),
        objective=STOCK_OBJECTIVE, candidates=grid.shape[1])
    best = profits.argmax(axis=1)  # first max: ties go to the smaller level
    return grid[np.arange(view.sku_count), best]


def solve_ss(view: SeriesRange, grid=None) -> tuple[np.ndarray, np.ndarray]:
    """Best (s, S) pair per SKU on the view's evaluation range."""
    if view.length <= 0:
        raise ConfigError("evaluation range is empty")
    s_lv, up_lv = ss_grid(view) if grid is None else grid
    profits = simulate_candidates(
        view, lambda pos, t: np.where(pos <= s_lv, up_lv - pos, 0),
        objective=FULL_OBJECTIVE, candidates=s_lv.shape[1])
    best = profits.argmax(axis=1)  # first max: smallest S, then smallest s
    rows = np.arange(view.sku_count)
    return s_lv[rows, best], up_lv[rows, best]


# ---------------------------------------------------------------------------
# Policy objects driven by the harness

def _positions(state: EnvState) -> np.ndarray:
    """Inventory position per cell: on-hand + in-transit + orders still
    awaiting upstream dispatch (they were booked but not yet shipped)."""
    position = state.inventory + state.in_transit
    if state.m > 1:
        position[:-1] += state.pending_demand[1:]
    return position


def _check_level_shape(levels: np.ndarray, state: EnvState) -> None:
    if levels.shape[1] != state.n or levels.shape[0] not in (1, state.m):
        raise ConfigError(
            f"policy levels shaped {levels.shape} do not fit a "
            f"{state.m}x{state.n} task")


class NeverPolicy:
    name = "never"

    def orders(self, state: EnvState, task: MaterializedTask) -> np.ndarray:
        return np.zeros((state.m, state.n), dtype=np.int64)


def _params_from_csv(path, columns) -> dict:
    import csv

    grids: dict[str, dict] = {c: {} for c in columns}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"warehouse", "sku_id", *columns} - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"params file {path} missing columns {sorted(missing)}")
        for row in reader:
            key = (int(row["warehouse"]), int(row["sku_id"]))
            for c in columns:
                grids[c][key] = int(row[c])
    if not grids[columns[0]]:
        raise ConfigError(f"params file {path} is empty")
    m = max(i for i, _ in grids[columns[0]]) + 1
    n = max(j for _, j in grids[columns[0]]) + 1
    out = []
    for c in columns:
        grid = np.zeros((m, n), dtype=np.int64)
        for (i, j), v in grids[c].items():
            grid[i, j] = v
        out.append(grid)
    return dict(zip(columns, out))


@dataclass
class BaseStockPolicy:
    """Order-up-to policy; one level per (warehouse, SKU). ``refresh_interval``
    switches on the dynamic mode: levels are re-solved on all history
    observed so far every that many steps."""

    levels: np.ndarray  # (M, N)
    refresh_interval: int | None = None
    name = "base-stock"
    _episode_start: int | None = None
    refresh_log: list = None  # type: ignore[assignment]

    def __post_init__(self):
        self.levels = np.atleast_2d(np.asarray(self.levels, dtype=np.int64))
        if (self.levels < 0).any():
            raise ConfigError("base stock level must be non-negative")
        self.refresh_log = []

    def orders(self, state: EnvState, task: MaterializedTask) -> np.ndarray:
        if self.refresh_interval is not None:
            if self._episode_start is None:
                self._episode_start = state.t
            elapsed = state.t - self._episode_start
            # the episode starts on the already-fitted levels; the first
            # re-fit happens one full interval in
            if elapsed and elapsed % self.refresh_interval == 0:
                self._refresh(state.t, task)
        _check_level_shape(self.levels, state)
        return base_stock_order(self.levels, _positions(state), 0)

    def _refresh(self, now: int, task: MaterializedTask) -> None:
        if now <= 0:
            return
        view = task.window_range(0, now, warmup=0)
        solved = solve_base_stock(view)
        self.levels = np.broadcast_to(solved, (task.m, task.n)).copy()
        self.refresh_log.append((now, 0, now, solved.copy()))

    @classmethod
    def from_csv(cls, path) -> "BaseStockPolicy":
        return cls(_params_from_csv(path, ("z",))["z"])


@dataclass
class SsPolicy:
    reorder: np.ndarray  # (M, N)
    up_to: np.ndarray    # (M, N)
    name = "ss"

    def __post_init__(self):
        self.reorder = np.atleast_2d(np.asarray(self.reorder, dtype=np.int64))
        self.up_to = np.atleast_2d(np.asarray(self.up_to, dtype=np.int64))
        if (self.reorder > self.up_to).any() or (self.reorder < 0).any():
            raise ConfigError("need 0 <= s <= S")

    def orders(self, state: EnvState, task: MaterializedTask) -> np.ndarray:
        _check_level_shape(self.up_to, state)
        return ss_order(self.reorder, self.up_to, _positions(state), 0)

    @classmethod
    def from_csv(cls, path) -> "SsPolicy":
        params = _params_from_csv(path, ("s", "S"))
        return cls(params["s"], params["S"])


def make_policy(kind: str, task: MaterializedTask, grid=None):
    """Resolve a policy name into a solved policy object.

    Static modes fit on the train range, hindsight on the test range; the
    dynamic base stock starts from the train fit and refreshes on observed
    history at the task's refresh interval.
    """
    if kind == "never":
        return NeverPolicy()
    if kind in ("bs-static", "bs-dynamic"):
        z = solve_base_stock(task.series_range("train"))
        levels = np.broadcast_to(z, (task.m, task.n)).copy()
        interval = task.spec.bs_refresh_interval if kind == "bs-dynamic" else None
        return BaseStockPolicy(levels, refresh_interval=interval)
    if kind in ("ss-static", "ss-hindsight"):
        split = "train" if kind == "ss-static" else "test"
        s, up = solve_ss(task.series_range(split), grid=grid)
        return SsPolicy(np.broadcast_to(s, (task.m, task.n)).copy(),
                        np.broadcast_to(up, (task.m, task.n)).copy())
    raise ConfigError(f"unknown policy {kind!r}")
