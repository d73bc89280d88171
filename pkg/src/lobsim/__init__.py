"""Agent-based limit-order-book market simulator with a realism-metric suite.

Simulate sessions with `run_simulation(preset("rmsc01"), seed)`, persist
traces with `ingest.write_event_log`, and score realism with
`report.compute_report` or the individual metric modules.
"""

from .book import BUY, SELL, Fill, LimitOrderBook, Order, OrderRejected
from .config import (PRESETS, SimConfig, build_kernel, load_config, preset,
                     run_simulation, save_config)
from .events import (CANCEL, EXECUTE, EVENT_TYPES, EventTrace, OrderEvent,
                     SUBMIT_LIMIT, SUBMIT_MARKET)
from .ingest import read_event_log, read_report, write_event_log, write_report
from .replay import ReplayResult, as_replay, replay_trace, validate_executions
from .report import METRIC_IDS, compare_reports, compute_report
from .series import (IntervalAggregates, ReturnSeries, SampledSeries,
                     interval_aggregates, log_returns, sample_mid)

__version__ = "0.1.0"

__all__ = [
    "BUY", "SELL", "Fill", "LimitOrderBook", "Order", "OrderRejected",
    "PRESETS", "SimConfig", "build_kernel", "load_config", "preset",
    "run_simulation", "save_config",
    "CANCEL", "EXECUTE", "EVENT_TYPES", "EventTrace", "OrderEvent",
    "SUBMIT_LIMIT", "SUBMIT_MARKET",
    "read_event_log", "read_report", "write_event_log", "write_report",
    "ReplayResult", "as_replay", "replay_trace", "validate_executions",
    "METRIC_IDS", "compare_reports", "compute_report",
    "IntervalAggregates", "ReturnSeries", "SampledSeries",
    "interval_aggregates", "log_returns", "sample_mid",
    "__version__",
]
