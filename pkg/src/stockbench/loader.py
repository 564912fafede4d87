"""CSV ingestion for SKU series.

Expected layout: UTF-8, header row, long format with one row per (SKU, step):

    sku_id,t,demand[,price,cost,lead_time,vol]

Optional columns fall back to defaults (vol 1, constant lead time, a flat
price/cost pair). Validation failures name the offending row or column.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .money import parse_money
from .types import LoadError, SkuSeries

REQUIRED_COLUMNS = ("sku_id", "t", "demand")
OPTIONAL_COLUMNS = ("price", "cost", "lead_time", "vol")
DEFAULT_PRICE = "10"
DEFAULT_COST = "5"
DEFAULT_LEAD_TIME = 3
DATA_DIR_ENV = "STOCKBENCH_DATA_DIR"


def resolve_data_path(path) -> Path:
    """Resolve a data file path, honoring the data-directory override."""
    p = Path(path)
    if p.is_absolute() or p.exists():
        return p
    base = os.environ.get(DATA_DIR_ENV)
    if base:
        candidate = Path(base) / p
        if candidate.exists():
            return candidate
    return p


def load_series(path, sku_count: int) -> SkuSeries:
    path = resolve_data_path(path)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise LoadError(f"cannot open {path}: {exc}") from exc

    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise LoadError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        for col in REQUIRED_COLUMNS:
            if col not in header:
                raise LoadError(f"{path}: missing required column '{col}'")
        for col in header:
            if col not in REQUIRED_COLUMNS + OPTIONAL_COLUMNS:
                raise LoadError(f"{path}: unknown column '{col}'")
        idx = {col: header.index(col) for col in header}
        width = len(header)

        rows: dict[str, dict[int, tuple]] = {}
        vols: dict[str, int] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise LoadError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")

            def get(col, default=None):
                if col not in idx:
                    return default
                return row[idx[col]].strip()

            sku = get("sku_id")
            try:
                t = int(get("t"))
                demand = int(get("demand"))
            except ValueError as exc:
                raise LoadError(f"{path}: row {lineno}: {exc}") from exc
            if t < 0:
                raise LoadError(f"{path}: row {lineno}: negative step index {t}")
            if demand < 0:
                raise LoadError(f"{path}: row {lineno}: negative demand {demand}")
            try:
                price = parse_money(get("price", DEFAULT_PRICE))
                cost = parse_money(get("cost", DEFAULT_COST))
            except (ValueError, ArithmeticError) as exc:
                raise LoadError(f"{path}: row {lineno}: bad money value: {exc}") from exc
            try:
                lead = int(get("lead_time", DEFAULT_LEAD_TIME))
            except ValueError as exc:
                raise LoadError(f"{path}: row {lineno}: {exc}") from exc
            if lead < 0:
                raise LoadError(f"{path}: row {lineno}: negative lead_time {lead}")
            vol_text = get("vol")
            vol = int(vol_text) if vol_text not in (None, "") else 1
            if vol <= 0:
                raise LoadError(f"{path}: row {lineno}: vol must be positive")

            per_sku = rows.setdefault(sku, {})
            if t in per_sku:
                raise LoadError(f"{path}: row {lineno}: duplicate step {t} for SKU {sku}")
            per_sku[t] = (demand, price, cost, lead)
            if sku in vols and vols[sku] != vol:
                raise LoadError(f"{path}: row {lineno}: SKU {sku} changes vol mid-series")
            vols[sku] = vol

    if len(rows) < sku_count:
        raise LoadError(f"{path}: found {len(rows)} SKUs, task needs {sku_count}")

    skus = sorted(rows)[:sku_count]
    horizons = {sku: len(rows[sku]) for sku in skus}
    horizon = horizons[skus[0]]
    for sku, h in horizons.items():
        if h != horizon:
            raise LoadError(f"{path}: SKU {sku} has {h} steps, expected {horizon}")
    for sku in skus:
        missing = set(range(horizon)) - set(rows[sku])
        if missing:
            raise LoadError(f"{path}: SKU {sku} missing step {min(missing)}")

    shape = (horizon, sku_count)
    demand = np.zeros(shape, dtype=np.int64)
    price = np.zeros(shape, dtype=np.int64)
    cost = np.zeros(shape, dtype=np.int64)
    lead = np.zeros(shape, dtype=np.int64)
    for j, sku in enumerate(skus):
        for t in range(horizon):
            d, p, c, l = rows[sku][t]
            demand[t, j] = d
            price[t, j] = p
            cost[t, j] = c
            lead[t, j] = l
    volume = np.array([vols[sku] for sku in skus], dtype=np.int64)
    series = SkuSeries(demand=demand, price=price, cost=cost, lead_time=lead, volume=volume)
    series.validate()
    return series


def write_series_csv(path, series: SkuSeries, sku_ids=None) -> None:
    """Inverse of load_series, mostly for tests and fixtures."""
    from .money import format_micros

    sku_ids = sku_ids or [f"sku{j:04d}" for j in range(series.sku_count)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sku_id", "t", "demand", "price", "cost", "lead_time", "vol"])
        for j, sku in enumerate(sku_ids):
            for t in range(series.horizon):
                writer.writerow([
                    sku, t, int(series.demand[t, j]),
                    format_micros(series.price[t, j]),
                    format_micros(series.cost[t, j]),
                    int(series.lead_time[t, j]),
                    int(series.volume[j]),
                ])
