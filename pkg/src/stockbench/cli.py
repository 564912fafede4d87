"""Command-line entry points.

    stockbench run --task sku200.single_store.standard --policy ss-static \
        --split test --seed 0 --out runs/demo
    stockbench list-tasks
    stockbench solve --task ... --policy bs-static --out params.csv
    stockbench bench --task sku2000.3_stores.standard
    stockbench report --run runs/demo
    stockbench export-tasks --out taskspecs
    stockbench serve-env

Exit code 0 on success; failures print one machine-readable JSON line on
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .harness import RULE_POLICIES, benchmark_throughput, run
from .policies import solve_base_stock, solve_ss
from .report import emit_report, render_html
from .tasks import TASK_NAMES, TASK_REGISTRY, build_task, registry_hash, spec_to_file
from .types import ConfigError, LoadError


def _cmd_run(args) -> int:
    result = run(args.task, args.policy, split=args.split, seed=args.seed,
                 collect_streams=args.streams is not None)
    if args.out:
        meta = emit_report(result, args.out)
        print(json.dumps(meta, sort_keys=True))
    else:
        print(json.dumps({"task": result.task_name, "policy": result.policy_name,
                          "metric_float": float(result.metric),
                          "metric": f"{result.metric.numerator}/{result.metric.denominator}"},
                         sort_keys=True))
    if args.streams:
        Path(args.streams).write_text(json.dumps(result.streams) + "\n", encoding="utf-8")
    return 0


def _cmd_list_tasks(_args) -> int:
    for name in TASK_NAMES:
        print(name)
    return 0


def _cmd_solve(args) -> int:
    task = build_task(args.task, seed=args.seed)
    if args.policy in ("bs-static", "bs-dynamic"):
        z = solve_base_stock(task.series_range("train"))
        rows = [(i, j, int(z[j])) for i in range(task.m) for j in range(task.n)]
        header = ("warehouse", "sku_id", "z")
    elif args.policy in ("ss-static", "ss-hindsight"):
        split = "train" if args.policy == "ss-static" else "test"
        s, up = solve_ss(task.series_range(split))
        rows = [(i, j, int(s[j]), int(up[j])) for i in range(task.m) for j in range(task.n)]
        header = ("warehouse", "sku_id", "s", "S")
    else:
        raise ConfigError(f"cannot solve policy {args.policy!r}")
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(json.dumps({"task": task.name, "policy": args.policy, "out": str(args.out)},
                     sort_keys=True))
    return 0


def _cmd_bench(args) -> int:
    rate = benchmark_throughput(args.task, policy=args.policy,
                                repetitions=args.repetitions, max_steps=args.max_steps)
    print(json.dumps({"task": args.task, "policy": args.policy,
                      "steps_per_second": round(rate, 1)}, sort_keys=True))
    return 0


def _cmd_report(args) -> int:
    paths = render_html(args.run)
    print(json.dumps({"written": [str(p) for p in paths]}, sort_keys=True))
    return 0


def _cmd_export_tasks(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in TASK_NAMES:
        spec_to_file(TASK_REGISTRY[name], out / f"{name}.json")
    print(json.dumps({"count": len(TASK_NAMES), "out": str(out),
                      "registry_hash": registry_hash()}, sort_keys=True))
    return 0


def _cmd_serve_env(_args) -> int:
    from .env_server import serve

    serve(sys.stdin, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stockbench",
                                     description="inventory simulation benchmark")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute one task/policy episode")
    p.add_argument("--task", required=True)
    p.add_argument("--policy", required=True,
                   help=f"one of {', '.join(RULE_POLICIES)} or external:<file>")
    p.add_argument("--split", default="test", choices=("train", "val", "validation", "test"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write CSV/HTML artifacts here")
    p.add_argument("--streams", default=None,
                   help="dump observation/reward streams to this JSON file")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("list-tasks", help="print the built-in task names")
    p.set_defaults(func=_cmd_list_tasks)

    p = sub.add_parser("solve", help="fit policy parameters and write them as CSV")
    p.add_argument("--task", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench", help="measure simulation steps/second")
    p.add_argument("--task", required=True)
    p.add_argument("--policy", default="never")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--max-steps", type=int, default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("report", help="render HTML pages from a run directory")
    p.add_argument("--run", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("export-tasks", help="write all built-in task spec files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_tasks)

    p = sub.add_parser("serve-env", help="JSON-lines episode server on stdio")
    p.set_defaults(func=_cmd_serve_env)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, LoadError, OSError, ValueError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
