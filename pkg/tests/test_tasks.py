import numpy as np
import pytest

from stockbench.money import to_micros
from stockbench.tasks import (
    TASK_NAMES,
    TASK_REGISTRY,
    build_task,
    eval_capacity_rule,
    get_spec,
    registry_hash,
    spec_from_file,
    spec_to_file,
)
from stockbench.types import ConfigError

EXPECTED_NAMES = sorted(
    [f"sku{size}.{store}.standard"
     for size in (50, 100, 200, 500, 1000, 2000)
     for store in ("single_store", "2_stores", "3_stores")]
    + [f"sku200.{store}.{cap}"
       for store in ("single_store", "2_stores", "3_stores")
       for cap in ("lower_capacity", "lowest_capacity")]
    + [f"sku200.{store}.dynamic_vlt" for store in ("single_store", "2_stores", "3_stores")]
    + ["sku200.single_store.increase_demand", "sku200.single_store.decrease_demand"]
    + [f"sku200.single_store.{lvl}_{kind}"
       for kind in ("backlog", "holding_cost", "order_cost", "overflow_cost")
       for lvl in ("higher", "highest")]
    + ["sku200.single_store.low_profit", "sku200.single_store.high_profit"]
    + [f"sku200.single_store.add_gap_{i}" for i in range(1, 7)]
    + [f"sku200.single_store.add_noise_{i}" for i in range(1, 7)]
)


def test_registry_has_exactly_51_expected_names():
    assert len(EXPECTED_NAMES) == 51
    assert list(TASK_NAMES) == EXPECTED_NAMES


def test_standard_task_materializes_documented_values():
    task = build_task("sku200.single_store.standard", seed=0)
    assert task.m == 1 and task.n == 200
    assert task.warehouses[0].capacity == 20000
    assert task.costs.order_cost == to_micros("10")
    assert task.costs.holding_cost == to_micros("0.003")
    # backlog = 0.1 * (p - c), overflow = 0.5 * c, exact on the money grid
    assert np.array_equal(task.costs.backlog_cost, (task.series.price - task.series.cost) // 10)
    assert np.array_equal(task.costs.overflow_cost, task.series.cost // 2)


def test_two_store_scaling_task():
    task = build_task("sku500.2_stores.standard", seed=1)
    assert task.m == 2 and task.n == 500
    assert all(w.capacity == 50000 for w in task.warehouses)


def test_capacity_rule_arithmetic():
    assert eval_capacity_rule("#SKU * 25", 200) == 5000
    assert eval_capacity_rule("20000", 123) == 20000
    with pytest.raises(ConfigError):
        eval_capacity_rule("#SKU + 1", 10)


def test_unknown_name_lists_nearest():
    with pytest.raises(ConfigError, match="nearest.*sku200.single_store.standard"):
        get_spec("sku200.single_store.standar")


def test_split_ranges_disjoint_and_ordered():
    task = build_task("sku100.single_store.standard")
    train, val, test = (task.split_range(s) for s in ("train", "val", "test"))
    assert train.stop <= val.start and val.stop <= test.start
    assert test.stop == task.spec.horizon
    assert task.split_range("validation") == val


def test_build_is_deterministic_per_seed():
    a = build_task("sku50.single_store.standard", seed=5)
    b = build_task("sku50.single_store.standard", seed=5)
    c = build_task("sku50.single_store.standard", seed=6)
    assert np.array_equal(a.series.demand, b.series.demand)
    assert not np.array_equal(a.series.demand, c.series.demand)


def test_gap_task_touches_only_test_range():
    base = build_task("sku200.single_store.standard", seed=2)
    gapped = build_task("sku200.single_store.add_gap_4", seed=2)
    test = base.split_range("test")
    assert np.array_equal(base.series.demand[: test.start], gapped.series.demand[: test.start])
    assert not np.array_equal(base.series.demand[test.start:], gapped.series.demand[test.start:])


def test_noise_task_touches_whole_horizon():
    base = build_task("sku200.single_store.standard", seed=2)
    noisy = build_task("sku200.single_store.add_noise_4", seed=2)
    train = base.split_range("train")
    assert not np.array_equal(base.series.demand[train.start:train.stop],
                              noisy.series.demand[train.start:train.stop])


def test_cost_variant_tasks_scale_standard_values():
    holding = build_task("sku200.single_store.highest_holding_cost")
    assert holding.costs.holding_cost == to_micros("0.015")
    order = build_task("sku200.single_store.higher_order_cost")
    assert order.costs.order_cost == to_micros("20")


def test_profit_variants_rescale_margin_and_action_space():
    base = build_task("sku50.single_store.standard", seed=3)
    low = build_task(TASK_REGISTRY["sku200.single_store.low_profit"], seed=3)
    assert max(low.action_multipliers) == 6
    high = build_task("sku200.single_store.high_profit", seed=3)
    assert max(high.action_multipliers) == 30
    assert (low.series.price >= low.series.cost).all()
    del base


def test_series_range_is_window_restricted():
    task = build_task("sku50.single_store.standard", seed=0)
    test_view = task.series_range("test")
    r = task.split_range("test")
    assert test_view.length == len(r)
    assert test_view.warmup == task.warmup_length
    assert np.array_equal(test_view.demand[test_view.warmup:],
                          task.series.demand[r.start:r.stop])
    # the view physically cannot reach outside its window
    assert test_view.demand.shape[0] == test_view.warmup + len(r)


def test_spec_file_roundtrip(tmp_path):
    spec = TASK_REGISTRY["sku200.single_store.add_noise_3"]
    path = tmp_path / "task.json"
    spec_to_file(spec, path)
    loaded = spec_from_file(path)
    assert loaded == spec
    task = build_task(str(path), seed=4)
    assert task.name == spec.name


def test_registry_hash_stable():
    assert registry_hash() == registry_hash()
    assert len(registry_hash()) == 64
