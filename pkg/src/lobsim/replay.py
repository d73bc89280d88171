"""Replay an event trace through the matching engine.

Book reconstruction is the bridge between a raw event log (simulated or
ingested) and every metric that needs trades, quotes or order lifetimes:
submissions and cancels drive a fresh LimitOrderBook, so fills, top-of-book
quotes, relative limit prices and lifetimes come out identically for
simulator output and for historical logs replayed under the same matching
rules. Logged EXECUTE rows are not used to mutate state; they can be
checked against the engine's own fills with `validate_executions`.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .book import BUY, LimitOrderBook, Order
from .events import CANCEL, EXECUTE, SUBMIT_LIMIT, SUBMIT_MARKET

CANCELLED = "CANCELLED"
FIRST_FILL = "FIRST_FILL"
COMPLETION = "COMPLETION"


class LifetimeSample(NamedTuple):
    order_id: int
    lifetime_ns: int
    kind: str


@dataclass
class ReplayResult:
    """Arrays derived from one pass over a trace.

    Fills carry one row per trade with the aggressor's sign (+1 when the
    incoming order bought). The quote timeline appends a row whenever the
    top of book changes; -1 encodes an absent side.
    """

    fill_time: np.ndarray
    fill_price: np.ndarray
    fill_size: np.ndarray
    fill_sign: np.ndarray          # +1 buyer-initiated, -1 seller-initiated
    quote_time: np.ndarray
    best_bid: np.ndarray
    best_ask: np.ndarray
    bid_size: np.ndarray
    ask_size: np.ndarray
    rel_sign: np.ndarray           # +1 buy limit, -1 sell limit
    rel_delta: np.ndarray          # cents from the same-side quote
    rel_skipped: int               # submissions without a prevailing quote
    lifetimes: list
    open_at_close: int
    n_limit: int
    n_market: int
    n_cancel: int

    def two_sided_quotes(self):
        """(times, bid, ask) restricted to instants with both sides quoted."""
        mask = (self.best_bid >= 0) & (self.best_ask >= 0)
        return self.quote_time[mask], self.best_bid[mask], self.best_ask[mask]

    def mid_timeline(self):
        times, bid, ask = self.two_sided_quotes()
        return times, (bid + ask) / 2.0

    def lifetime_ns_by_kind(self, kind: str) -> np.ndarray:
        return np.array([s.lifetime_ns for s in self.lifetimes if s.kind == kind],
                        dtype=np.int64)


def replay_trace(trace) -> ReplayResult:
    book = LimitOrderBook()
    fill_time, fill_price, fill_size, fill_sign = (array("q"), array("q"),
                                                   array("q"), array("b"))
    q_time, q_bid, q_ask, q_bv, q_av = (array("q") for _ in range(5))
    rel_sign, rel_delta = array("b"), array("q")
    rel_skipped = 0
    lifetimes = []
    live = {}  # order_id -> [submit_ts, remaining, first_fill_ts]
    n_limit = n_market = n_cancel = 0
    last_quote = None

    for ev in trace:
        ts = ev.timestamp_ns
        etype = ev.event_type
        if etype == SUBMIT_LIMIT:
            n_limit += 1
            b = book.best_bid()
            a = book.best_ask()
            if ev.side == BUY:
                if b is None:
                    rel_skipped += 1
                else:
                    rel_sign.append(1)
                    rel_delta.append(b - ev.price_cents)
            else:
                if a is None:
                    rel_skipped += 1
                else:
                    rel_sign.append(-1)
                    rel_delta.append(ev.price_cents - a)
            live[ev.order_id] = [ts, ev.size, -1]
            order = Order(ev.order_id, ev.agent_id, ev.side, ev.price_cents,
                          ev.size, ts)
            fills = book.submit_limit(order)
            if fills:
                _apply_fills(ts, fills, ev, live, lifetimes,
                             fill_time, fill_price, fill_size, fill_sign)
        elif etype == SUBMIT_MARKET:
            n_market += 1
            result = book.submit_market(ev.side, ev.size, ts, ev.order_id,
                                        ev.agent_id)
            if result.fills:
                _apply_fills(ts, result.fills, ev, live, lifetimes,
                             fill_time, fill_price, fill_size, fill_sign)
        elif etype == CANCEL:
            n_cancel += 1
            canceled = book.cancel(ev.order_id)
            if canceled is not None:
                state = live.pop(ev.order_id)
                lifetimes.append(LifetimeSample(ev.order_id, ts - state[0],
                                                CANCELLED))
        elif etype == EXECUTE:
            continue  # book state is driven by submissions and cancels
        quote = book.best_quotes()
        if quote != last_quote:
            last_quote = quote
            b, a, vb, va = quote
            q_time.append(ts)
            q_bid.append(-1 if b is None else b)
            q_ask.append(-1 if a is None else a)
            q_bv.append(-1 if vb is None else vb)
            q_av.append(-1 if va is None else va)

    return ReplayResult(
        fill_time=np.frombuffer(fill_time, dtype=np.int64),
        fill_price=np.frombuffer(fill_price, dtype=np.int64),
        fill_size=np.frombuffer(fill_size, dtype=np.int64),
        fill_sign=np.frombuffer(fill_sign, dtype=np.int8).astype(np.int64),
        quote_time=np.frombuffer(q_time, dtype=np.int64),
        best_bid=np.frombuffer(q_bid, dtype=np.int64),
        best_ask=np.frombuffer(q_ask, dtype=np.int64),
        bid_size=np.frombuffer(q_bv, dtype=np.int64),
        ask_size=np.frombuffer(q_av, dtype=np.int64),
        rel_sign=np.frombuffer(rel_sign, dtype=np.int8).astype(np.int64),
        rel_delta=np.frombuffer(rel_delta, dtype=np.int64),
        rel_skipped=rel_skipped,
        lifetimes=lifetimes,
        open_at_close=len(live),
        n_limit=n_limit,
        n_market=n_market,
        n_cancel=n_cancel,
    )


def _apply_fills(ts, fills, ev, live, lifetimes,
                 fill_time, fill_price, fill_size, fill_sign):
    """Record one row per trade and update lifetime bookkeeping."""
    taker_sign = 1 if ev.side == BUY else -1
    taker_id = ev.order_id
    for f in fills:
        fill_time.append(ts)
        fill_price.append(f.price)
        fill_size.append(f.size)
        fill_sign.append(taker_sign)
        for oid in (f.maker_order_id, taker_id):
            state = live.get(oid)
            if state is None:
                continue  # market-order takers are not tracked
            if state[2] < 0:
                state[2] = ts
                lifetimes.append(LifetimeSample(oid, ts - state[0], FIRST_FILL))
            state[1] -= f.size
            if state[1] <= 0:
                lifetimes.append(LifetimeSample(oid, ts - state[0], COMPLETION))
                del live[oid]


def as_replay(source) -> ReplayResult:
    """Accept an EventTrace or a ReplayResult; replays (and caches) traces."""
    if isinstance(source, ReplayResult):
        return source
    cached = getattr(source, "_replay_cache", None)
    if cached is None:
        cached = replay_trace(source)
        source._replay_cache = cached
    return cached


def validate_executions(trace) -> list[str]:
    """Compare logged EXECUTE rows against the engine's replayed fills.

    Each engine fill should appear as a maker row followed by a taker row
    with matching price and size. Returns human-readable discrepancies
    (empty when the log is consistent).
    """
    book = LimitOrderBook()
    problems = []
    logged = iter([(i, e) for i, e in enumerate(trace) if e.event_type == EXECUTE])

    def next_logged():
        return next(logged, (None, None))

    for ev in trace:
        fills = None
        if ev.event_type == SUBMIT_LIMIT:
            fills = book.submit_limit(Order(ev.order_id, ev.agent_id, ev.side,
                                            ev.price_cents, ev.size,
                                            ev.timestamp_ns))
        elif ev.event_type == SUBMIT_MARKET:
            fills = book.submit_market(ev.side, ev.size, ev.timestamp_ns,
                                       ev.order_id, ev.agent_id).fills
        elif ev.event_type == CANCEL:
            book.cancel(ev.order_id)
        if not fills:
            continue
        for f in fills:
            for expect_id in (f.maker_order_id, ev.order_id):
                idx, row = next_logged()
                if row is None:
                    problems.append(f"missing EXECUTE row for fill {f}")
                    return problems
                if (row.order_id, row.price_cents, row.size) != (expect_id, f.price, f.size):
                    problems.append(
                        f"row {idx}: EXECUTE {row.order_id}@{row.price_cents}x{row.size} "
                        f"!= engine fill {expect_id}@{f.price}x{f.size}")
    idx, row = next_logged()
    if row is not None:
        problems.append(f"row {idx}: EXECUTE without a matching engine fill")
    return problems
