"""Benchmark task definitions.

A TaskSpec is a declarative description of one scenario: chain depth, SKU
count, a capacity rule, per-unit cost rules, data source, non-stationarity
transforms, horizon split, warmup length, and the action space. The built-in
registry derives 51 tasks from one standard single-store configuration by
varying scale, chain depth, capacity pressure, cost structure, and demand
transforms. Specs serialize to JSON (see taskspecs/ for copy-editable files)
and materialize into concrete series plus engine configs.
"""

from __future__ import annotations

import difflib
import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from .generate import SyntheticProfile, generate_synthetic
from .loader import load_series
from .money import parse_money, scale_micros
from .transforms import apply_demand_ramp, apply_gap, apply_lead_jitter, apply_noise
from .types import ConfigError, CostParams, SkuSeries, WarehouseConfig

DEFAULT_HORIZON = 1825  # five 365-step years: 60/20/20 gives a 365-step test
DEFAULT_WARMUP = 100
DEFAULT_MULTIPLIERS = ("0", "0.5", "1", "1.5", "2", "2.5", "3", "4", "5", "6", "8", "10", "12")
LOW_PROFIT_MULTIPLIERS = DEFAULT_MULTIPLIERS[:10]
HIGH_PROFIT_MULTIPLIERS = DEFAULT_MULTIPLIERS + ("16", "20", "24", "30")
DEFAULT_ACTION_WINDOW = 21

_CAPACITY_RE = re.compile(r"^\s*(?:#SKU\s*\*\s*(\d+)|(\d+))\s*$")


def eval_capacity_rule(rule: str, sku_count: int) -> int:
    m = _CAPACITY_RE.match(rule)
    if not m:
        raise ConfigError(f"cannot parse capacity rule {rule!r}")
    value = sku_count * int(m.group(1)) if m.group(1) else int(m.group(2))
    if value <= 0:
        raise ConfigError(f"capacity rule {rule!r} must evaluate positive")
    return value


@dataclass(frozen=True)
class CostRule:
    """One per-unit cost: a constant, a fraction of the sale margin, or a
    fraction of procurement cost. Fractions resolve per step and SKU."""

    kind: str  # const | margin_frac | cost_frac
    value: str

    def resolve(self, price: np.ndarray, cost: np.ndarray):
        if self.kind == "const":
            return parse_money(self.value)
        frac = Fraction(Decimal(self.value))
        if self.kind == "margin_frac":
            # negative margins would reward unmet demand; floor at zero
            return np.maximum(scale_micros(price - cost, frac), 0)
        if self.kind == "cost_frac":
            return scale_micros(cost, frac)
        raise ConfigError(f"unknown cost rule kind {self.kind!r}")

    def scaled(self, factor: int) -> "CostRule":
        return CostRule(self.kind, str(Decimal(self.value) * factor))


STANDARD_COSTS = {
    "order": CostRule("const", "10"),
    "holding": CostRule("const", "0.003"),  # 0.002 storage + 0.001 capital
    "backlog": CostRule("margin_frac", "0.1"),
    "overflow": CostRule("cost_frac", "0.5"),
}


@dataclass(frozen=True)
class TaskSpec:
    name: str
    echelons: int
    sku_count: int
    capacity_rule: str = "#SKU * 100"
    cost_rules: dict = field(default_factory=lambda: dict(STANDARD_COSTS))
    source: dict = field(default_factory=lambda: {"synthetic": {"seed": 0}})
    gap_level: int = 0
    noise_level: int = 0
    dynamic_lead: bool = False
    demand_ramp: str | None = None
    horizon: int = DEFAULT_HORIZON
    splits: dict = None  # type: ignore[assignment]
    warmup: int = DEFAULT_WARMUP
    action_multipliers: tuple = DEFAULT_MULTIPLIERS
    action_window: int = DEFAULT_ACTION_WINDOW
    margin_scale: str | None = None  # price rescaled to cost + scale*(price-cost)
    bs_refresh_interval: int = 30

    def __post_init__(self):
        if self.splits is None:
            object.__setattr__(self, "splits", default_splits(self.horizon))
        validate_splits(self.splits, self.horizon)
        if self.echelons < 1 or self.sku_count < 1:
            raise ConfigError("need at least one echelon and one SKU")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "echelons": self.echelons,
            "sku_count": self.sku_count,
            "capacity_rule": self.capacity_rule,
            "cost_rules": {k: {"kind": r.kind, "value": r.value} for k, r in self.cost_rules.items()},
            "source": self.source,
            "transforms": {
                "gap_level": self.gap_level,
                "noise_level": self.noise_level,
                "dynamic_lead": self.dynamic_lead,
                "demand_ramp": self.demand_ramp,
                "margin_scale": self.margin_scale,
            },
            "horizon": self.horizon,
            "splits": {k: list(v) for k, v in self.splits.items()},
            "warmup": self.warmup,
            "action": {"multipliers": list(self.action_multipliers), "window": self.action_window},
            "solver": {"bs_refresh_interval": self.bs_refresh_interval},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskSpec":
        tr = d.get("transforms", {})
        act = d.get("action", {})
        solver = d.get("solver", {})
        return cls(
            name=d["name"],
            echelons=int(d["echelons"]),
            sku_count=int(d["sku_count"]),
            capacity_rule=d.get("capacity_rule", "#SKU * 100"),
            cost_rules={k: CostRule(v["kind"], v["value"])
                        for k, v in d.get("cost_rules", {}).items()} or dict(STANDARD_COSTS),
            source=d.get("source", {"synthetic": {"seed": 0}}),
            gap_level=int(tr.get("gap_level", 0)),
            noise_level=int(tr.get("noise_level", 0)),
            dynamic_lead=bool(tr.get("dynamic_lead", False)),
            demand_ramp=tr.get("demand_ramp"),
            horizon=int(d.get("horizon", DEFAULT_HORIZON)),
            splits={k: tuple(v) for k, v in d["splits"].items()} if "splits" in d else None,
            warmup=int(d.get("warmup", DEFAULT_WARMUP)),
            action_multipliers=tuple(act.get("multipliers", DEFAULT_MULTIPLIERS)),
            action_window=int(act.get("window", DEFAULT_ACTION_WINDOW)),
            margin_scale=tr.get("margin_scale"),
            bs_refresh_interval=int(solver.get("bs_refresh_interval", 30)),
        )


def default_splits(horizon: int) -> dict:
    a, b = int(horizon * 0.6), int(horizon * 0.8)
    return {"train": (0, a), "val": (a, b), "test": (b, horizon)}


def validate_splits(splits: dict, horizon: int) -> None:
    need = ("train", "val", "test")
    if tuple(sorted(splits)) != tuple(sorted(need)):
        raise ConfigError(f"splits must name exactly {need}")
    prev_stop = 0
    for name in need:
        start, stop = splits[name]
        if not (prev_stop <= start < stop <= horizon):
            raise ConfigError(f"split {name!r}=({start},{stop}) out of order for horizon {horizon}")
        prev_stop = stop


# ---------------------------------------------------------------------------
# Built-in registry

_SIZES = (50, 100, 200, 500, 1000, 2000)
_STORES = {"single_store": 1, "2_stores": 2, "3_stores": 3}


def _variant(base: TaskSpec, suffix: str, **kw) -> TaskSpec:
    return replace(base, name=f"{base.name.rsplit('.', 1)[0]}.{suffix}", **kw)


def _build_registry() -> dict:
    reg: dict[str, TaskSpec] = {}

    def add(spec: TaskSpec) -> None:
        if spec.name in reg:
            raise ConfigError(f"duplicate task name {spec.name}")
        reg[spec.name] = spec

    for size in _SIZES:
        for store, m in _STORES.items():
            add(TaskSpec(name=f"sku{size}.{store}.standard", echelons=m, sku_count=size))

    for store, m in _STORES.items():
        base = reg[f"sku200.{store}.standard"]
        add(_variant(base, "lower_capacity", capacity_rule="#SKU * 50"))
        add(_variant(base, "lowest_capacity", capacity_rule="#SKU * 25"))
        add(_variant(base, "dynamic_vlt", dynamic_lead=True))

    std = reg["sku200.single_store.standard"]
    add(_variant(std, "increase_demand", demand_ramp="increase"))
    add(_variant(std, "decrease_demand", demand_ramp="decrease"))

    def scaled_costs(key: str, factor: int) -> dict:
        rules = dict(STANDARD_COSTS)
        rules[key] = rules[key].scaled(factor)
        return rules

    for key, stem in (("backlog", "backlog"), ("holding", "holding_cost"),
                      ("order", "order_cost"), ("overflow", "overflow_cost")):
        add(_variant(std, f"higher_{stem}", cost_rules=scaled_costs(key, 2)))
        add(_variant(std, f"highest_{stem}", cost_rules=scaled_costs(key, 5)))

    add(_variant(std, "low_profit", margin_scale="0.5",
                 action_multipliers=LOW_PROFIT_MULTIPLIERS))
    add(_variant(std, "high_profit", margin_scale="2",
                 action_multipliers=HIGH_PROFIT_MULTIPLIERS))

    for level in range(1, 7):
        add(_variant(std, f"add_gap_{level}", gap_level=level))
        add(_variant(std, f"add_noise_{level}", noise_level=level))

    return reg


TASK_REGISTRY = _build_registry()
TASK_NAMES = tuple(sorted(TASK_REGISTRY))


def registry_hash() -> str:
    payload = json.dumps([TASK_REGISTRY[name].to_dict() for name in TASK_NAMES],
                         sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()


def get_spec(name: str) -> TaskSpec:
    try:
        return TASK_REGISTRY[name]
    except KeyError:
        close = difflib.get_close_matches(name, TASK_NAMES, n=3)
        hint = f"; nearest: {', '.join(close)}" if close else ""
        raise ConfigError(f"unknown task {name!r}{hint}") from None


def spec_to_file(spec: TaskSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def spec_from_file(path) -> TaskSpec:
    return TaskSpec.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Materialization

@dataclass(frozen=True)
class SeriesRange:
    """A window of the series handed to a solver: its evaluation range plus
    ``warmup`` lead-in rows (index 0 is warmup steps before the range). The
    restriction is what enforces the train/test discipline: a solver can only
    read what its range covers. Cost grids are sliced to the same window."""

    demand: np.ndarray
    price: np.ndarray
    cost: np.ndarray
    lead_time: np.ndarray
    volume: np.ndarray
    warmup: int
    overflow_cost: "int | np.ndarray" = 0
    order_cost: "int | np.ndarray" = 0
    holding_cost: "int | np.ndarray" = 0
    backlog_cost: "int | np.ndarray" = 0

    @property
    def length(self) -> int:
        return self.demand.shape[0] - self.warmup

    @property
    def sku_count(self) -> int:
        return self.demand.shape[1]

    def money_row(self, name: str, t: int):
        v = getattr(self, name)
        if isinstance(v, (int, np.integer)):
            return int(v)
        return v[t] if v.ndim == 2 else v


@dataclass
class MaterializedTask:
    spec: TaskSpec
    seed: int
    series: SkuSeries
    costs: CostParams
    warehouses: list
    splits: dict
    warmup_length: int
    action_multipliers: tuple
    action_window: int

    @property
    def m(self) -> int:
        return self.spec.echelons

    @property
    def n(self) -> int:
        return self.spec.sku_count

    @property
    def name(self) -> str:
        return self.spec.name

    def split_range(self, split: str) -> range:
        key = {"validation": "val"}.get(split, split)
        if key not in self.splits:
            raise ConfigError(f"unknown split {split!r} (train/val/test)")
        start, stop = self.splits[key]
        return range(start, stop)

    def effective_warmup(self, split: str) -> int:
        return min(self.warmup_length, self.split_range(split).start)

    def series_range(self, split: str) -> SeriesRange:
        r = self.split_range(split)
        w = self.effective_warmup(split)
        return self.window_range(r.start - w, r.stop, warmup=w)

    def window_range(self, lo: int, hi: int, warmup: int = 0) -> SeriesRange:
        if not 0 <= lo <= hi <= self.series.horizon:
            raise ConfigError(f"window [{lo},{hi}) outside horizon {self.series.horizon}")

        def cut(v):
            if isinstance(v, (int, np.integer)):
                return int(v)
            return v[lo:hi] if v.ndim == 2 else v

        return SeriesRange(
            demand=self.series.demand[lo:hi],
            price=self.series.price[lo:hi],
            cost=self.series.cost[lo:hi],
            lead_time=self.series.lead_time[lo:hi],
            volume=self.series.volume,
            warmup=warmup,
            overflow_cost=cut(self.costs.overflow_cost),
            order_cost=cut(self.costs.order_cost),
            holding_cost=cut(self.costs.holding_cost),
            backlog_cost=cut(self.costs.backlog_cost),
        )


def _materialize_series(spec: TaskSpec, seed: int) -> SkuSeries:
    src = spec.source
    if "synthetic" in src:
        params = dict(src["synthetic"])
        params.pop("seed", None)
        profile = SyntheticProfile(**params.pop("profile", {})) if "profile" in params else None
        series = generate_synthetic(seed, spec.sku_count, spec.horizon, profile)
    elif "csv" in src:
        series = load_series(src["csv"]["path"], spec.sku_count).copy()
        if series.horizon < spec.horizon:
            raise ConfigError(
                f"CSV horizon {series.horizon} shorter than task horizon {spec.horizon}")
        series = SkuSeries(
            demand=series.demand[:spec.horizon],
            price=series.price[:spec.horizon],
            cost=series.cost[:spec.horizon],
            lead_time=series.lead_time[:spec.horizon],
            volume=series.volume,
        )
    else:
        raise ConfigError(f"task {spec.name!r} has no usable data source")

    if spec.margin_scale is not None:
        frac = Fraction(Decimal(spec.margin_scale))
        margin = scale_micros(series.price - series.cost, frac)
        series.price = series.cost + np.maximum(margin, 0)

    if spec.dynamic_lead:
        series.lead_time = apply_lead_jitter(series.lead_time, seed=(seed, 3))
    if spec.noise_level:
        series.demand = apply_noise(series.demand, spec.noise_level, seed=(seed, 2))
    test_start, test_stop = spec.splits["test"]
    if spec.gap_level:
        series.demand[test_start:test_stop] = apply_gap(
            series.demand[test_start:test_stop], spec.gap_level, seed=(seed, 1))
    if spec.demand_ramp:
        series.demand[test_start:test_stop] = apply_demand_ramp(
            series.demand[test_start:test_stop], spec.demand_ramp)
    series.validate()
    return series


def build_task(task, seed: int | None = None) -> MaterializedTask:
    """Materialize a task from a registry name, a spec file path, or a
    TaskSpec. ``seed`` overrides the data seed declared in the source."""
    if isinstance(task, MaterializedTask):
        return task
    if isinstance(task, TaskSpec):
        spec = task
    elif isinstance(task, (str, Path)):
        text = str(task)
        if text in TASK_REGISTRY:
            spec = TASK_REGISTRY[text]
        elif Path(text).suffix == ".json" and Path(text).exists():
            spec = spec_from_file(text)
        else:
            spec = get_spec(text)  # raises with nearest matches
    else:
        raise ConfigError(f"cannot build a task from {type(task).__name__}")

    if seed is None:
        seed = int(spec.source.get("synthetic", {}).get("seed", 0))
    series = _materialize_series(spec, seed)

    costs = CostParams(
        selling_price=series.price,
        procurement_cost=series.cost,
        overflow_cost=spec.cost_rules["overflow"].resolve(series.price, series.cost),
        order_cost=spec.cost_rules["order"].resolve(series.price, series.cost),
        holding_cost=spec.cost_rules["holding"].resolve(series.price, series.cost),
        backlog_cost=spec.cost_rules["backlog"].resolve(series.price, series.cost),
    )
    capacity = eval_capacity_rule(spec.capacity_rule, spec.sku_count)
    warehouses = [WarehouseConfig(capacity=capacity) for _ in range(spec.echelons)]
    return MaterializedTask(
        spec=spec,
        seed=seed,
        series=series,
        costs=costs,
        warehouses=warehouses,
        splits=dict(spec.splits),
        warmup_length=spec.warmup,
        action_multipliers=tuple(Fraction(Decimal(x)) for x in spec.action_multipliers),
        action_window=spec.action_window,
    )
