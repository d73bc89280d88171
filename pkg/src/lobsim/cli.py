"""Command line: simulate sessions, analyze event logs, compare reports.

All diagnostics go to stderr and data goes to files, so exit status 0
means clean output. Relative output paths resolve against $LOBSIM_OUT_DIR
when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .config import load_config, preset, PRESETS
from .ingest import EventLogError, read_event_log, read_report, write_event_log, write_report
from .report import DEFAULTS, METRIC_IDS, compare_reports, compute_report

_UNITS = {"ns": 1, "us": 1_000, "ms": 1_000_000, "s": 1_000_000_000,
          "m": 60_000_000_000, "h": 3_600_000_000_000}


def parse_duration_ns(text: str) -> int:
    """'90s', '5m', '1h', '250ms', or a bare nanosecond integer."""
    text = text.strip()
    for suffix in sorted(_UNITS, key=len, reverse=True):
        if text.endswith(suffix):
            return int(float(text[: -len(suffix)]) * _UNITS[suffix])
    return int(text)


def _out_path(path: str) -> str:
    base = os.environ.get("LOBSIM_OUT_DIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _cmd_simulate(args, parser):
    from .config import run_simulation  # deferred: keeps --help fast

    if bool(args.preset) == bool(args.config):
        parser.error("provide exactly one of --preset or --config")
    if args.preset:
        if args.preset not in PRESETS:
            parser.error(f"unknown preset {args.preset!r}; "
                         f"available: {', '.join(sorted(PRESETS))}")
        config = preset(args.preset)
    else:
        config = load_config(args.config)
    if args.session_close:
        config.session_close = args.session_close
    started = time.perf_counter()
    trace = run_simulation(config, args.seed)
    elapsed = time.perf_counter() - started
    out = _out_path(args.out)
    write_event_log(trace, out)
    counts = trace.counts_by_type()
    agents = len({e.agent_id for e in trace})
    print(f"simulated {config.name} seed={args.seed}: {len(trace)} events "
          f"({', '.join(f'{k}={v}' for k, v in counts.items())}) "
          f"from {agents} active agents in {elapsed:.1f}s -> {out}",
          file=sys.stderr)
    return 0


def _cmd_analyze(args, parser):
    if args.metrics != "all":
        requested = [m.strip() for m in args.metrics.split(",") if m.strip()]
        bad = [m for m in requested if m not in METRIC_IDS]
        if bad:
            parser.error(f"unknown metric ids: {', '.join(bad)}; "
                         f"see --list-metrics")
    else:
        requested = "all"
    try:
        trace = read_event_log(args.events, strict=not args.lenient)
    except EventLogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if getattr(trace, "dropped_rows", 0):
        print(f"warning: dropped {trace.dropped_rows} malformed rows",
              file=sys.stderr)
    trace.session_open_ns = args.session_open_ns
    trace.session_close_ns = args.session_close_ns
    report = compute_report(
        trace, metrics=requested,
        dt_ns=parse_duration_ns(args.dt),
        tau_ns=parse_duration_ns(args.tau),
        n_bins=args.bins,
        acf_window_ns=parse_duration_ns(args.acf_window),
        flow_window_ns=parse_duration_ns(args.flow_window),
        intraday_degree=args.degree,
    )
    out = _out_path(args.out)
    write_report(report, out)
    n_ok = sum(1 for k, v in report.items()
               if not k.startswith("_") and not v["warnings"])
    print(f"analyzed {args.events}: {len(trace)} events, "
          f"{n_ok} metrics clean -> {out}", file=sys.stderr)
    return 0


def _cmd_compare(args, parser):
    baseline = read_report(args.baseline)
    candidate = read_report(args.candidate)
    diff = compare_reports(baseline, candidate)
    out = _out_path(args.out)
    write_report(diff, out)
    print(f"compared {args.baseline} vs {args.candidate}: "
          f"{len(diff['common'])} common metrics -> {out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lobsim",
        description="Agent-based limit-order-book simulator and realism metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one session, write an event log")
    sim.add_argument("--preset", help=f"one of: {', '.join(sorted(PRESETS))}")
    sim.add_argument("--config", help="YAML config file")
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--out", required=True, help="event log path (.csv or .csv.gz)")
    sim.add_argument("--session-close", help="override HH:MM:SS close time")

    ana = sub.add_parser("analyze", help="compute metrics over an event log")
    ana.add_argument("--events", required=True)
    ana.add_argument("--metrics", default="all",
                     help="'all' or comma-separated metric ids")
    ana.add_argument("--out", required=True, help="report JSON path")
    ana.add_argument("--dt", default="60s", help="return sampling step")
    ana.add_argument("--tau", default="5m", help="aggregation interval")
    ana.add_argument("--bins", type=int, default=DEFAULTS["n_bins"],
                     help="participation bins for the impact curve")
    ana.add_argument("--acf-window", default="30m",
                     help="window for per-window lag-1 autocorrelations")
    ana.add_argument("--flow-window", default="5m",
                     help="window for order counts")
    ana.add_argument("--degree", type=int, default=DEFAULTS["intraday_degree"],
                     help="intraday profile polynomial degree")
    ana.add_argument("--session-open-ns", type=int, default=None)
    ana.add_argument("--session-close-ns", type=int, default=None)
    ana.add_argument("--lenient", action="store_true",
                     help="drop malformed rows instead of aborting")

    cmp_ = sub.add_parser("compare", help="diff two metric reports")
    cmp_.add_argument("--baseline", required=True)
    cmp_.add_argument("--candidate", required=True)
    cmp_.add_argument("--out", required=True)

    lst = sub.add_parser("list-metrics", help="print documented metric ids")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        return _cmd_simulate(args, parser)
    if args.command == "analyze":
        return _cmd_analyze(args, parser)
    if args.command == "compare":
        return _cmd_compare(args, parser)
    if args.command == "list-metrics":
        print("\n".join(METRIC_IDS))
        return 0
    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
