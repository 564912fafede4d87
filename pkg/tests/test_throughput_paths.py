"""Relative speed of the two engine paths at benchmark scale."""

import time

from stockbench.engine import new_state, step, warmup_levels
from stockbench.policies import base_stock_order
from stockbench.reference import step_scalar_reference
from stockbench.tasks import build_task


def rate(task, step_fn, steps) -> float:
    levels = warmup_levels(task.series, 0, 100)
    state = new_state(task.m, task.n, t=task.split_range("test").start)
    started = time.perf_counter()
    for _ in range(steps):
        orders = base_stock_order(levels[None, :], state.inventory, state.in_transit)
        state, _ = step_fn(state, orders, task.series, task.costs, task.warehouses)
    return steps / (time.perf_counter() - started)


def test_scalar_reference_not_faster_than_matrix_at_scale():
    task = build_task("sku2000.single_store.standard")
    matrix = rate(task, step, 30)
    scalar = rate(task, step_scalar_reference, 5)
    assert scalar <= matrix
