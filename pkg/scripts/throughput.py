#!/usr/bin/env python3
"""Throughput sweep across task scales, matrix engine vs scalar reference.

The scalar path is measured on a truncated horizon; both figures are
steps/second on one thread.
"""

import argparse
import sys
import time

import numpy as np

from stockbench.engine import new_state, warmup_levels
from stockbench.harness import benchmark_throughput
from stockbench.policies import BaseStockPolicy, base_stock_order
from stockbench.reference import step_scalar_reference
from stockbench.tasks import build_task

DEFAULT_TASKS = (
    "sku200.single_store.standard",
    "sku500.2_stores.standard",
    "sku2000.single_store.standard",
    "sku2000.3_stores.standard",
)


def scalar_rate(task, steps: int) -> float:
    levels = warmup_levels(task.series, 0, 100)
    split = task.split_range("test")
    state = new_state(task.m, task.n, t=split.start)
    started = time.perf_counter()
    for _ in range(steps):
        orders = base_stock_order(levels[None, :], state.inventory, state.in_transit)
        state, _ = step_scalar_reference(state, orders, task.series, task.costs,
                                         task.warehouses)
    return steps / (time.perf_counter() - started)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tasks", nargs="+", default=list(DEFAULT_TASKS))
    parser.add_argument("--scalar-steps", type=int, default=20)
    args = parser.parse_args()

    print(f"{'task':40s} {'matrix steps/s':>14s} {'scalar steps/s':>14s}")
    for name in args.tasks:
        task = build_task(name)
        levels = warmup_levels(task.series, 0, 100)
        policy = BaseStockPolicy(np.broadcast_to(levels, (task.m, task.n)).copy())
        matrix = benchmark_throughput(task, policy, repetitions=2, max_steps=200)
        scalar = scalar_rate(task, args.scalar_steps)
        print(f"{name:40s} {matrix:14.0f} {scalar:14.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
