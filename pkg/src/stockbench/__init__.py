"""stockbench: a multi-echelon, multi-SKU inventory simulation benchmark.

Deterministic vectorized engine with exact fixed-point accounting, a scalar
reference path for verification, 51 built-in benchmark tasks over synthetic
or CSV demand data, classical replenishment baselines (order-up-to and
(s, S), static/dynamic/hindsight), a per-(warehouse, SKU) agent episode API,
and an experiment harness with CSV/HTML reporting.
"""

__version__ = "0.1.0"

from .engine import new_state, profit, step, warmup, warmup_levels
from .episode import (
    ActionSpace,
    EpisodeHandle,
    RollingNormalizer,
    convert_action,
    feature_names,
    reset,
    step_episode,
    step_episode_orders,
)
from .generate import SyntheticProfile, generate_synthetic
from .harness import RunResult, benchmark_throughput, compute_gmv, run
from .loader import load_series, write_series_csv
from .money import MONEY_SCALE, format_micros, micros_to_decimal, micros_to_fraction, to_micros
from .policies import (
    BaseStockPolicy,
    NeverPolicy,
    SsPolicy,
    base_stock_order,
    make_policy,
    solve_base_stock,
    solve_ss,
    ss_order,
)
from .reference import step_scalar_reference
from .report import emit_report, metric_from_csv, render_html
from .tasks import (
    TASK_NAMES,
    TASK_REGISTRY,
    MaterializedTask,
    SeriesRange,
    TaskSpec,
    build_task,
    registry_hash,
)
from .transforms import apply_demand_ramp, apply_gap, apply_lead_jitter, apply_noise
from .types import (
    AcceptStrategy,
    ConfigError,
    CostParams,
    EnvState,
    LoadError,
    SkuSeries,
    StepRecord,
    WarehouseConfig,
)
