"""Experiment runner.

Executes one (task, policy, split, seed) cell to a RunResult holding the full
step ledger, the evaluation metric -- mean profit over all (warehouse, SKU)
cells summed over steps, kept as an exact rational -- plus wall-clock time
and an engine-allocation memory estimate.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from .episode import reset, step_episode, step_episode_orders
from .money import MONEY_SCALE, micros_to_decimal
from .policies import BaseStockPolicy, SsPolicy, make_policy
from .tasks import MaterializedTask, build_task
from .types import ConfigError, StepRecord

RULE_POLICIES = ("never", "bs-static", "bs-dynamic", "ss-static", "ss-hindsight")


@dataclass
class RunResult:
    task_name: str
    policy_name: str
    split: str
    seed: int
    m: int
    n: int
    records: list
    metric: Fraction
    wall_clock: float
    peak_memory_estimate: int
    streams: dict | None = None

    @property
    def steps(self) -> int:
        return len(self.records)

    def total_profit_micros(self) -> int:
        return sum(r.total_profit_micros() for r in self.records)

    def metric_decimal(self) -> Decimal:
        return Decimal(self.metric.numerator) / Decimal(self.metric.denominator)

    def recompute_metric(self) -> Fraction:
        return Fraction(self.total_profit_micros(), self.m * self.n * MONEY_SCALE)


def load_action_stream(path) -> np.ndarray:
    """Scripted actions: .npy matrix (steps, agents) or CSV with columns
    step,warehouse,sku,action."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"action stream {path} does not exist")
    if path.suffix == ".npy":
        arr = np.load(path)
        if arr.ndim != 2:
            raise ConfigError(f"action stream {path} must be 2-D (steps, agents)")
        return arr.astype(np.int64)
    import csv

    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        need = {"step", "warehouse", "sku", "action"}
        if set(reader.fieldnames or ()) < need:
            raise ConfigError(f"action CSV needs columns {sorted(need)}")
        for row in reader:
            rows.append((int(row["step"]), int(row["warehouse"]), int(row["sku"]),
                         int(row["action"])))
    if not rows:
        raise ConfigError(f"action stream {path} is empty")
    steps = max(r[0] for r in rows) + 1
    m = max(r[1] for r in rows) + 1
    n = max(r[2] for r in rows) + 1
    out = np.zeros((steps, m * n), dtype=np.int64)
    for t, i, j, a in rows:
        out[t, i * n + j] = a
    return out


def _estimate_memory(task: MaterializedTask, records: list) -> int:
    series = task.series
    series_bytes = sum(getattr(series, f).nbytes
                       for f in ("demand", "price", "cost", "lead_time", "volume"))
    state_bytes = 8 * task.m * task.n * 6
    record_bytes = 0
    if records:
        rec = records[0]
        per = sum(getattr(rec, f).nbytes for f in (
            "demand", "sale", "arrival", "received", "order", "end_inventory",
            "end_in_transit", "income", "procurement_cost", "overflow_cost",
            "order_cost", "holding_cost", "backlog_cost", "profit"))
        record_bytes = per * len(records)
    return series_bytes + state_bytes + record_bytes


def run(task, policy, split: str = "test", seed: int | None = None,
        collect_streams: bool = False) -> RunResult:
    """Execute a full episode. ``policy`` is a name from RULE_POLICIES,
    ``external:<file>`` for a scripted action stream, or a policy object."""
    task = build_task(task, seed=seed)
    effective_seed = task.seed

    external_actions = None
    if isinstance(policy, str):
        if policy.startswith("external:"):
            external_actions = load_action_stream(policy.split(":", 1)[1])
            policy_name = policy
        elif policy.startswith("bs:"):
            policy_name = policy
            policy = BaseStockPolicy.from_csv(policy.split(":", 1)[1])
        elif policy.startswith("ss:"):
            policy_name = policy
            policy = SsPolicy.from_csv(policy.split(":", 1)[1])
        elif policy in RULE_POLICIES:
            policy_name = policy
            policy = make_policy(policy, task)
        else:
            raise ConfigError(
                f"unknown policy {policy!r}; expected one of {RULE_POLICIES}, "
                "external:<file>, bs:<params.csv>, or ss:<params.csv>")
    else:
        policy_name = getattr(policy, "name", type(policy).__name__)

    handle, obs = reset(task, split)
    if external_actions is not None:
        episode_len = handle.stop - handle.state.t
        if external_actions.shape[0] < episode_len:
            raise ConfigError(
                f"action stream has {external_actions.shape[0]} steps, episode needs {episode_len}")
        if external_actions.shape[1] != handle.agents:
            raise ConfigError(
                f"action stream has {external_actions.shape[1]} agents, task has {handle.agents}")

    records: list[StepRecord] = []
    streams = {"observations": [obs.tolist()], "rewards_micros": []} if collect_streams else None
    started = time.perf_counter()
    t_rel = 0
    while not handle.done:
        if external_actions is not None:
            obs, rewards, done, info = step_episode(handle, external_actions[t_rel])
        else:
            orders = policy.orders(handle.state, task)
            obs, rewards, done, info = step_episode_orders(
                handle, orders, with_observation=collect_streams)
        records.append(info["record"])
        if streams is not None:
            streams["observations"].append(obs.tolist())
            streams["rewards_micros"].append([int(x) for x in info["rewards_micros"]])
        t_rel += 1
    elapsed = time.perf_counter() - started

    total = sum(r.total_profit_micros() for r in records)
    result = RunResult(
        task_name=task.name,
        policy_name=policy_name,
        split=split,
        seed=effective_seed,
        m=task.m,
        n=task.n,
        records=records,
        metric=Fraction(total, task.m * task.n * MONEY_SCALE),
        wall_clock=elapsed,
        peak_memory_estimate=_estimate_memory(task, records),
    )
    result.streams = streams
    return result


def compute_gmv(result: RunResult) -> np.ndarray:
    """Gross merchandise volume per cell: total sale * price micros, which is
    exactly the accumulated income component."""
    out = np.zeros((result.m, result.n), dtype=np.int64)
    for rec in result.records:
        out += rec.income
    return out


def gmv_decimal(result: RunResult, i: int, j: int) -> Decimal:
    return micros_to_decimal(compute_gmv(result)[i, j])


def benchmark_throughput(task, policy: str = "never", repetitions: int = 3,
                         max_steps: int | None = None, split: str = "test") -> float:
    """Median simulation steps/second over ``repetitions`` episodes, one
    instance, warm cache (the first episode is run unmeasured)."""
    if repetitions < 1:
        raise ConfigError("repetitions must be >= 1")
    task = build_task(task)
    rates = []
    for rep in range(repetitions + 1):
        handle, _ = reset(task, split)
        pol = make_policy(policy, task) if policy in RULE_POLICIES else policy
        steps = 0
        budget = max_steps or (handle.stop - handle.state.t)
        started = time.perf_counter()
        while not handle.done and steps < budget:
            orders = pol.orders(handle.state, task)
            step_episode_orders(handle, orders, with_observation=False)
            steps += 1
        elapsed = time.perf_counter() - started
        if rep and elapsed > 0:
            rates.append(steps / elapsed)
    return statistics.median(rates)
