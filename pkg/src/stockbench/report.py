"""Run artifacts: per-warehouse step ledgers as CSV and static HTML pages.

The CSVs are the single source of truth -- emitted byte-identically for
identical runs (no timestamps, fixed 6-decimal money) -- and every HTML
table, total, and summary figure is rendered from the parsed CSV content,
so the two can never disagree.
"""

from __future__ import annotations

import csv
import html
import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .money import MONEY_SCALE, format_micros
from .types import ConfigError

DETAIL_COLUMNS = (
    "step", "sku", "demand", "sale", "arrival", "accepted", "order", "excess",
    "inventory", "in_transit", "profit", "procurement_cost", "backlog_cost",
    "order_cost", "holding_cost",
)
MONEY_COLUMNS = ("profit", "procurement_cost", "backlog_cost", "order_cost", "holding_cost")

_STYLE = (
    "body{font-family:sans-serif;margin:1.5em}table{border-collapse:collapse}"
    "td,th{border:1px solid #999;padding:2px 8px;text-align:right}"
    "th{background:#eee}tr.total td{font-weight:bold;background:#f5f5f5}"
    "caption{text-align:left;font-weight:bold;padding:4px 0}"
)


def emit_run_artifacts(result, out_dir) -> dict:
    """Write run.json plus one detail CSV per warehouse and a summary CSV."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc

    meta = {
        "task": result.task_name,
        "policy": result.policy_name,
        "split": result.split,
        "seed": result.seed,
        "warehouses": result.m,
        "skus": result.n,
        "steps": result.steps,
        "metric": f"{result.metric.numerator}/{result.metric.denominator}",
        "metric_float": float(result.metric),
        "total_profit": format_micros(result.total_profit_micros()),
    }
    (out / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")
    # wall clock varies run to run; kept apart so run.json stays reproducible
    resources = {
        "wall_clock_seconds": round(result.wall_clock, 6),
        "peak_memory_estimate_bytes": result.peak_memory_estimate,
    }
    (out / "resources.json").write_text(json.dumps(resources, indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")

    for i in range(result.m):
        with open(out / f"warehouse_{i}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(DETAIL_COLUMNS)
            for rec in result.records:
                for j in range(result.n):
                    writer.writerow([
                        rec.t, j,
                        int(rec.demand[i, j]), int(rec.sale[i, j]),
                        int(rec.arrival[i, j]), int(rec.received[i, j]),
                        int(rec.order[i, j]),
                        int(rec.arrival[i, j] - rec.received[i, j]),
                        int(rec.end_inventory[i, j]), int(rec.end_in_transit[i, j]),
                        format_micros(rec.profit[i, j]),
                        format_micros(rec.procurement_cost[i, j]),
                        format_micros(rec.backlog_cost[i, j]),
                        format_micros(rec.order_cost[i, j]),
                        format_micros(rec.holding_cost[i, j]),
                    ])

    _write_summary_csv(result, out)
    return meta


def _write_summary_csv(result, out: Path) -> None:
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["warehouse", "sku", "demand", "sale", "overflow",
                         "profit", "gmv", "holding_cost", "holding_share_of_gmv"])
        for i in range(result.m):
            for j in range(result.n):
                demand = sale = overflow = 0
                profit = gmv = holding = 0
                for rec in result.records:
                    demand += int(rec.demand[i, j])
                    sale += int(rec.sale[i, j])
                    overflow += int(rec.arrival[i, j] - rec.received[i, j])
                    profit += int(rec.profit[i, j])
                    gmv += int(rec.income[i, j])
                    holding += int(rec.holding_cost[i, j])
                share = "" if gmv == 0 else f"{Fraction(holding, gmv).numerator / Fraction(holding, gmv).denominator:.6f}"
                writer.writerow([i, j, demand, sale, overflow,
                                 format_micros(profit), format_micros(gmv),
                                 format_micros(holding), share])


def metric_from_csv(run_dir) -> Fraction:
    """Recompute the run metric purely from the emitted CSV files."""
    run_dir = Path(run_dir)
    meta = json.loads((run_dir / "run.json").read_text(encoding="utf-8"))
    total = 0
    for i in range(meta["warehouses"]):
        with open(run_dir / f"warehouse_{i}.csv", newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                total += int(Decimal(row["profit"]) * MONEY_SCALE)
    return Fraction(total, meta["warehouses"] * meta["skus"] * MONEY_SCALE)


def _render_table(header, rows, caption, totals=None) -> str:
    parts = [f"<table><caption>{html.escape(caption)}</caption><tr>"]
    parts += [f"<th>{html.escape(h)}</th>" for h in header]
    parts.append("</tr>")
    for row in rows:
        parts.append("<tr>" + "".join(f"<td>{html.escape(str(v))}</td>" for v in row) + "</tr>")
    if totals is not None:
        parts.append('<tr class="total">' + "".join(
            f"<td>{html.escape(str(v))}</td>" for v in totals) + "</tr>")
    parts.append("</table>")
    return "".join(parts)


def _page(title: str, body: str) -> str:
    return ("<!DOCTYPE html><html><head><meta charset='utf-8'>"
            f"<title>{html.escape(title)}</title><style>{_STYLE}</style></head>"
            f"<body><h1>{html.escape(title)}</h1>{body}</body></html>\n")


def render_html(run_dir) -> list:
    """Render warehouse pages and a summary page from a run directory's CSVs.
    Returns the written paths."""
    run_dir = Path(run_dir)
    meta = json.loads((run_dir / "run.json").read_text(encoding="utf-8"))
    written = []

    wh_totals = {}
    for i in range(meta["warehouses"]):
        csv_path = run_dir / f"warehouse_{i}.csv"
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
        totals = ["total", ""]
        for col in range(2, len(header)):
            if header[col] in MONEY_COLUMNS:
                s = sum(int(Decimal(r[col]) * MONEY_SCALE) for r in rows)
                totals.append(format_micros(s))
            else:
                totals.append(sum(int(r[col]) for r in rows))
        wh_totals[i] = dict(zip(header, totals))
        body = _render_table(header, rows, f"Per-step, per-SKU ledger (warehouse {i})", totals)
        page = _page(f"{meta['task']} - warehouse {i}", body)
        path = run_dir / f"warehouse_{i}.html"
        path.write_text(page, encoding="utf-8")
        written.append(path)

    head = ["warehouse", "demand", "sale", "excess", "profit"]
    rows = [[i, wh_totals[i]["demand"], wh_totals[i]["sale"], wh_totals[i]["excess"],
             wh_totals[i]["profit"]] for i in range(meta["warehouses"])]
    info_rows = [[k, meta[k]] for k in ("task", "policy", "split", "seed", "steps",
                                        "metric", "metric_float", "total_profit")]
    body = _render_table(["key", "value"], info_rows, "Run")
    body += _render_table(head, rows, "Warehouse totals")
    body += _summary_table(run_dir)
    index = run_dir / "index.html"
    index.write_text(_page(f"{meta['task']} - run report", body), encoding="utf-8")
    written.append(index)
    return written


def _summary_table(run_dir: Path) -> str:
    with open(run_dir / "summary.csv", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return _render_table(header, rows, "Per-SKU totals and GMV share")


def emit_report(result, out_dir) -> dict:
    """CSV artifacts plus HTML pages in one call."""
    meta = emit_run_artifacts(result, out_dir)
    render_html(out_dir)
    return meta
