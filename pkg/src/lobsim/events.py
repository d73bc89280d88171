"""Canonical order-event records shared by the simulator and ingested data."""

from __future__ import annotations

from typing import NamedTuple, Optional

SUBMIT_LIMIT = "SUBMIT_LIMIT"
SUBMIT_MARKET = "SUBMIT_MARKET"
CANCEL = "CANCEL"
EXECUTE = "EXECUTE"

EVENT_TYPES = (SUBMIT_LIMIT, SUBMIT_MARKET, CANCEL, EXECUTE)


class OrderEvent(NamedTuple):
    """One timestamped order-stream record.

    For EXECUTE, each trade emits two rows at the same timestamp: first the
    resting (maker) order's row, then the incoming (taker) order's row, so
    the aggressor side is always the side of the second row of a pair.
    `price_cents` is 0 for market-order submissions; `agent_id` is -1 for
    ingested historical data.
    """

    timestamp_ns: int
    event_type: str
    order_id: int
    agent_id: int
    side: str
    price_cents: int
    size: int


class EventTrace:
    """Ordered order-event sequence for one asset over one session."""

    def __init__(self, events=None, session_open_ns: Optional[int] = None,
                 session_close_ns: Optional[int] = None, config: Optional[dict] = None):
        self.events: list[OrderEvent] = list(events) if events else []
        self.session_open_ns = session_open_ns
        self.session_close_ns = session_close_ns
        self.config = config or {}

    def append(self, event: OrderEvent):
        self.events.append(event)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]

    def __eq__(self, other):
        return isinstance(other, EventTrace) and self.events == other.events

    def span(self) -> tuple[int, int]:
        """Session bounds; falls back to first/last event timestamps."""
        if self.session_open_ns is not None and self.session_close_ns is not None:
            return self.session_open_ns, self.session_close_ns
        if not self.events:
            raise ValueError("empty trace with no session bounds")
        return self.events[0].timestamp_ns, self.events[-1].timestamp_ns

    def counts_by_type(self) -> dict[str, int]:
        out = {t: 0 for t in EVENT_TYPES}
        for ev in self.events:
            out[ev.event_type] += 1
        return out
