"""Read/write the canonical event-log CSV and metric-report JSON.

The event log is plain CSV with the exact header
``timestamp_ns,event_type,order_id,agent_id,side,price_cents,size``.
All fields are integers except event_type and side; timestamps are never
floats so nanosecond exactness survives a round trip. Files ending in
``.gz`` are transparently gzip-compressed.
"""

from __future__ import annotations

import csv
import gzip
import io
import json

from .book import BUY, SELL
from .events import EVENT_TYPES, EventTrace, OrderEvent

HEADER = ["timestamp_ns", "event_type", "order_id", "agent_id", "side",
          "price_cents", "size"]

_TYPE_SET = frozenset(EVENT_TYPES)
_SIDE_SET = frozenset((BUY, SELL))


class EventLogError(ValueError):
    """Malformed event log (strict mode aborts with line context)."""


def _open_text(path, mode):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", newline="")
    return open(path, mode, newline="")


def read_event_log(path, strict: bool = True):
    """Parse an event log into an EventTrace.

    In strict mode any malformed row (bad field count, unknown type/side,
    non-positive size, decreasing timestamp) aborts with the line number.
    Lenient mode drops bad rows; the dropped count is returned on the trace
    as ``trace.dropped_rows``.
    """
    trace = EventTrace()
    dropped = 0
    last_ts = None
    with _open_text(path, "r") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EventLogError(f"{path}: empty file, expected header {','.join(HEADER)}")
        if header != HEADER:
            raise EventLogError(f"{path}: bad header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            try:
                if len(row) != 7:
                    raise ValueError(f"expected 7 fields, got {len(row)}")
                ts = int(row[0])
                etype = row[1]
                if etype not in _TYPE_SET:
                    raise ValueError(f"unknown event_type {etype!r}")
                side = row[4]
                if side not in _SIDE_SET:
                    raise ValueError(f"unknown side {side!r}")
                size = int(row[6])
                if size <= 0:
                    raise ValueError(f"non-positive size {size}")
                if last_ts is not None and ts < last_ts:
                    raise ValueError(f"decreasing timestamp {ts} < {last_ts}")
                ev = OrderEvent(ts, etype, int(row[2]), int(row[3]), side,
                                int(row[5]), size)
            except ValueError as exc:
                if strict:
                    raise EventLogError(f"{path}:{lineno}: {exc}") from None
                dropped += 1
                continue
            last_ts = ts
            trace.events.append(ev)
    trace.dropped_rows = dropped
    return trace


def write_event_log(trace, path):
    """Write an EventTrace as CSV (bit-exact round trip with read_event_log)."""
    with _open_text(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        writer.writerows(trace.events)


def write_report(report: dict, path):
    """Serialize a metric report as deterministic (sorted-key) JSON."""
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
    with open(path, "w") as fh:
        fh.write(text)
        fh.write("\n")


def read_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def trace_to_csv_bytes(trace) -> bytes:
    """In-memory CSV rendering, used for byte-identity checks."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    writer.writerows(trace.events)
    return buf.getvalue().encode()
