"""Per-(warehouse, SKU) agent view over the engine.

Each of the M*N cells is one agent. An episode positions the clock at a
split's first step after running the built-in warmup on the steps just
before it, then exchanges flat per-agent arrays: observations in, discrete
action indices in, rewards out. Actions index a multiplier table applied to
the trailing mean of the demand each agent faced (consumer demand at echelon
0, received downstream orders upstream). Rewards are each agent's exact
profit for the step; normalization is an opt-in wrapper, never baked in.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .engine import new_state, step, warmup
from .money import MONEY_SCALE
from .tasks import MaterializedTask, build_task
from .types import ConfigError, EnvState, StepRecord

SKU_FEATURES = (
    "in_stock",
    "selling_price",
    "procurement_cost",
    "demand_mean",
    "demand_std",
    "holding_cost",
    "order_cost",
    "lead_time",
)
WAREHOUSE_FEATURES = (
    "warehouse_stock",
    "warehouse_free_frac",
    "warehouse_stock_profit",
    "warehouse_in_transit",
    "warehouse_transit_profit",
)


def feature_names() -> tuple[str, ...]:
    return SKU_FEATURES + WAREHOUSE_FEATURES


@dataclass(frozen=True)
class ActionSpace:
    """Discrete multipliers over the trailing mean demand."""

    multipliers: tuple[Fraction, ...]
    window: int = 21

    def __post_init__(self):
        if not self.multipliers or self.multipliers[0] != 0:
            raise ConfigError("multiplier set must start at 0")
        if any(b < a for a, b in zip(self.multipliers, self.multipliers[1:])):
            raise ConfigError("multipliers must be sorted ascending")
        if self.window < 1:
            raise ConfigError("averaging window must be >= 1")

    @property
    def size(self) -> int:
        return len(self.multipliers)


class RollingNormalizer:
    """Streaming z-score over everything seen so far (Welford). The stats
    update after each emission, so a constant stream normalizes to zero from
    the second value on; raw values stay available to the caller."""

    def __init__(self, shape, eps: float = 1e-8):
        self.count = 0
        self.mean = np.zeros(shape)
        self._m2 = np.zeros(shape)
        self.eps = eps

    @property
    def std(self) -> np.ndarray:
        if self.count < 1:
            return np.zeros_like(self.mean)
        return np.sqrt(self._m2 / self.count)

    def normalize(self, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=np.float64)
        if self.count == 0:
            out = np.zeros_like(value)
        else:
            out = (value - self.mean) / np.maximum(self.std, self.eps)
        self.update(value)
        return out

    def update(self, value: np.ndarray) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean = self.mean + delta / self.count
        self._m2 = self._m2 + delta * (value - self.mean)


def convert_action(action_index, multipliers, demand_history) -> np.ndarray:
    """Orders = round(multiplier * trailing mean demand), elementwise.

    demand_history is a sequence of (M, N) demand matrices, newest last;
    fewer rows than the window means the mean runs over what exists.
    """
    action_index = np.asarray(action_index)
    if (action_index < 0).any() or (action_index >= len(multipliers)).any():
        raise ConfigError("action index outside the multiplier table")
    if not demand_history:
        return np.zeros(action_index.shape, dtype=np.int64)
    total = np.zeros(action_index.shape, dtype=np.int64)
    for d in demand_history:
        total = total + d
    count = len(demand_history)
    nums = np.asarray([m.numerator for m in multipliers], dtype=np.int64)[action_index]
    dens = np.asarray([m.denominator for m in multipliers], dtype=np.int64)[action_index]
    # round-half-up of (mult * total / count) in exact integers
    num = nums * total
    den = dens * count
    return ((2 * num + den) // (2 * den)).astype(np.int64)


@dataclass
class EpisodeHandle:
    task: MaterializedTask
    split: str
    state: EnvState
    stop: int
    action_space: ActionSpace
    demand_history: deque
    normalize_observations: bool = False
    normalize_rewards: bool = False
    obs_normalizer: RollingNormalizer | None = None
    reward_normalizer: RollingNormalizer | None = None
    last_record: StepRecord | None = None
    steps_taken: int = 0

    @property
    def agents(self) -> int:
        return self.task.m * self.task.n

    @property
    def done(self) -> bool:
        return self.state.t >= self.stop


def reset(task, split: str = "test", seed: int | None = None, *,
          normalize_observations: bool = False,
          normalize_rewards: bool = False) -> tuple[EpisodeHandle, np.ndarray]:
    """Build an episode at the split's start. The warmup runs entirely on the
    steps before the split, so it consumes pre-split data only; its demand
    trace seeds the trailing histories."""
    task = build_task(task, seed=seed)
    split_range = task.split_range(split)
    if len(split_range) < 1:
        raise ConfigError(f"split {split!r} is empty")
    w = task.effective_warmup(split)
    state = new_state(task.m, task.n, t=split_range.start - w)
    history: deque = deque(maxlen=task.action_window)
    if w:
        state, records = warmup(state, task.series, task.costs, task.warehouses, w,
                                collect=True)
        for rec in records:
            history.append(rec.demand)
    space = ActionSpace(multipliers=task.action_multipliers, window=task.action_window)
    handle = EpisodeHandle(
        task=task,
        split=split,
        state=state,
        stop=split_range.stop,
        action_space=space,
        demand_history=history,
        normalize_observations=normalize_observations,
        normalize_rewards=normalize_rewards,
    )
    if normalize_observations:
        handle.obs_normalizer = RollingNormalizer((handle.agents, len(feature_names())))
    if normalize_rewards:
        handle.reward_normalizer = RollingNormalizer((handle.agents,))
    return handle, observe(handle)


def observe(handle: EpisodeHandle) -> np.ndarray:
    """Observation matrix (agents, features), agents ordered warehouse-major."""
    task = handle.task
    state = handle.state
    m, n = task.m, task.n
    t = min(state.t, task.series.horizon - 1)
    price = task.series.price[t] / MONEY_SCALE
    cost = task.series.cost[t] / MONEY_SCALE
    margin = (task.series.price[t] - task.series.cost[t]) / MONEY_SCALE

    hist = list(handle.demand_history)
    if hist:
        stack = np.stack(hist)  # (steps, M, N)
        d_mean = stack.mean(axis=0)
        d_std = stack.std(axis=0)
    else:
        d_mean = np.zeros((m, n))
        d_std = np.zeros((m, n))

    def money_grid(name):
        v = task.costs.row(name, t)
        row = np.full(n, v, dtype=np.int64) if isinstance(v, int) else v
        return row / MONEY_SCALE

    holding = money_grid("holding_cost")
    order_fee = money_grid("order_cost")

    obs = np.empty((m, n, len(feature_names())), dtype=np.float64)
    obs[:, :, 0] = state.inventory
    obs[:, :, 1] = price[None, :]
    obs[:, :, 2] = cost[None, :]
    obs[:, :, 3] = d_mean
    obs[:, :, 4] = d_std
    obs[:, :, 5] = holding[None, :]
    obs[:, :, 6] = order_fee[None, :]
    obs[:, :, 7] = task.series.lead_time[t][None, :]

    vol = task.series.volume
    for i in range(m):
        cap = task.warehouses[i].capacity
        used = float(vol @ state.inventory[i])
        obs[i, :, 8] = state.inventory[i].sum()
        obs[i, :, 9] = 1.0 if cap is None else (cap - used) / cap
        obs[i, :, 10] = float(margin @ state.inventory[i])
        obs[i, :, 11] = state.in_transit[i].sum()
        obs[i, :, 12] = float(margin @ state.in_transit[i])

    flat = obs.reshape(m * n, -1)
    if handle.normalize_observations and handle.obs_normalizer is not None:
        return handle.obs_normalizer.normalize(flat)
    return flat


def step_episode(handle: EpisodeHandle, actions) -> tuple[np.ndarray, np.ndarray, bool, dict]:
    """Convert actions to orders, advance one engine step, emit per-agent
    rewards (each agent's exact step profit, as floats of currency)."""
    if handle.done:
        raise ConfigError("episode is done; reset before stepping again")
    task = handle.task
    actions = np.asarray(actions)
    if actions.size != handle.agents:
        raise ConfigError(f"need {handle.agents} actions, got {actions.size}")
    if not np.issubdtype(actions.dtype, np.integer):
        raise ConfigError("actions must be integer indices")
    grid = actions.reshape(task.m, task.n)
    orders = convert_action(grid, handle.action_space.multipliers,
                            handle.demand_history)
    return step_episode_orders(handle, orders)


def step_episode_orders(handle: EpisodeHandle, orders,
                        with_observation: bool = True,
                        ) -> tuple[np.ndarray | None, np.ndarray, bool, dict]:
    """Advance with explicit order quantities (used by rule-based policies).
    ``with_observation=False`` skips building the feature matrix, which
    rule-driven sweeps never read."""
    if handle.done:
        raise ConfigError("episode is done; reset before stepping again")
    task = handle.task
    state, record = step(handle.state, orders, task.series, task.costs, task.warehouses)
    handle.state = state
    handle.last_record = record
    handle.steps_taken += 1
    handle.demand_history.append(record.demand)

    rewards_micros = record.profit.reshape(-1)
    rewards = rewards_micros / MONEY_SCALE
    if handle.normalize_rewards and handle.reward_normalizer is not None:
        rewards = handle.reward_normalizer.normalize(rewards)
    obs = observe(handle) if with_observation else None
    info = {
        "t": record.t,
        "record": record,
        "rewards_micros": rewards_micros,
        "step_profit_micros": record.total_profit_micros(),
    }
    return obs, rewards, handle.done, info
