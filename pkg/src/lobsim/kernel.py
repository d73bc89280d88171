"""Deterministic discrete-event kernel: nanosecond time, latency, wakeups.

The kernel owns a single priority queue of messages keyed by
(deliver_at, insertion sequence), so ties in delivery time are broken by
send order and a (config, seed) pair always replays to the identical
trace. Agents never touch the book directly; everything goes through
messages to the exchange agent.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import NamedTuple, Optional

from .book import BUY, SELL, LimitOrderBook, Order
from .events import CANCEL, EXECUTE, SUBMIT_LIMIT, SUBMIT_MARKET, EventTrace, OrderEvent

EXCHANGE_ID = 0


class CausalityError(RuntimeError):
    """A message or wakeup was scheduled before the current kernel time."""


# -- message payloads ----------------------------------------------------

class LimitOrderRequest(NamedTuple):
    order_id: int
    side: str
    price: int
    size: int


class MarketOrderRequest(NamedTuple):
    order_id: int
    side: str
    size: int


class CancelRequest(NamedTuple):
    order_id: int


class DepthQuery(NamedTuple):
    n_levels: int = 1
    include_events: int = 0  # recent order events to piggyback on the reply


class DepthReply(NamedTuple):
    bids: tuple
    asks: tuple
    events: tuple


class FillNotice(NamedTuple):
    order_id: int
    side: str
    price: int
    size: int
    remaining: int


class WakeUp(NamedTuple):
    pass


class LastTradeQuery(NamedTuple):
    pass


class LastTradeReply(NamedTuple):
    price: Optional[int]


WAKEUP = WakeUp()


class Message(NamedTuple):
    """Queue record; heap order is (deliver_at, seq), so ties in delivery
    time preserve send order. Internally the kernel stores these as plain
    tuples of the same shape for speed."""

    deliver_at: int
    seq: int
    sender_id: int
    recipient_id: int
    payload: object


class Agent:
    """Base class: override on_start / on_wakeup / on_message."""

    def __init__(self, agent_id: int):
        self.agent_id = agent_id
        self.kernel: Kernel = None

    def on_start(self, open_ns: int, close_ns: int):
        pass

    def on_wakeup(self, now: int):
        pass

    def on_message(self, now: int, sender_id: int, payload):
        pass


class Kernel:
    """Single-threaded event loop over [open_ns, close_ns)."""

    def __init__(self, agents, open_ns: int, close_ns: int,
                 latency_ns: int = 1000, computation_delay_ns: int = 0):
        if latency_ns < 0 or computation_delay_ns < 0:
            raise ValueError("latency and computation delay must be >= 0")
        self.agents = {a.agent_id: a for a in agents}
        if len(self.agents) != len(agents):
            raise ValueError("duplicate agent ids")
        self.open_ns = open_ns
        self.close_ns = close_ns
        self.latency_ns = latency_ns
        self.computation_delay_ns = computation_delay_ns
        self._queue: list[Message] = []
        self._seq = 0
        self._now = open_ns
        self.messages_sent = 0
        self.messages_delivered = 0
        self.messages_expired = 0
        for a in agents:
            a.kernel = self

    def now(self) -> int:
        return self._now

    def latency(self, sender_id: int, recipient_id: int) -> int:
        return self.latency_ns

    def send(self, sender_id: int, recipient_id: int, payload):
        deliver_at = (self._now + self.latency(sender_id, recipient_id)
                      + self.computation_delay_ns)
        if deliver_at < self._now:
            raise CausalityError(f"delivery at {deliver_at} before now {self._now}")
        self._seq += 1
        self.messages_sent += 1
        heapq.heappush(self._queue,
                       (deliver_at, self._seq, sender_id, recipient_id, payload))

    def schedule_wakeup(self, agent_id: int, at: int):
        if at < self._now:
            raise CausalityError(f"wakeup at {at} before now {self._now}")
        self._seq += 1
        self.messages_sent += 1
        heapq.heappush(self._queue, (at, self._seq, agent_id, agent_id, WAKEUP))

    def run(self):
        """Dispatch messages in (time, seq) order until the close time."""
        for agent in self.agents.values():
            agent.on_start(self.open_ns, self.close_ns)
        queue = self._queue
        close = self.close_ns
        agents = self.agents
        heappop = heapq.heappop
        delivered = 0
        while queue:
            deliver_at = queue[0][0]
            if deliver_at >= close:
                break
            if deliver_at < self._now:
                raise CausalityError(
                    f"message at {deliver_at} after clock reached {self._now}")
            deliver_at, _seq, sender_id, recipient_id, payload = heappop(queue)
            self._now = deliver_at
            agent = agents[recipient_id]
            try:
                if payload is WAKEUP:
                    agent.on_wakeup(deliver_at)
                else:
                    agent.on_message(deliver_at, sender_id, payload)
            except Exception as exc:
                raise RuntimeError(
                    f"agent {recipient_id} failed at t={deliver_at}: {exc}") from exc
            delivered += 1
        self.messages_delivered = delivered
        self.messages_expired = len(queue)
        self._now = close


class ExchangeAgent(Agent):
    """Owns the book, emits the event trace, answers queries.

    Keeps a bounded deque of recent order events so belief-learning agents
    can request a limited-length order-stream snapshot with their depth
    query (agents still never see the book itself).
    """

    def __init__(self, agent_id: int = EXCHANGE_ID, event_memory: int = 512):
        super().__init__(agent_id)
        self.book = LimitOrderBook()
        self.trace = EventTrace()
        self.recent = deque(maxlen=max(1, event_memory))
        self.last_trade_price: Optional[int] = None
        self._owner: dict[int, int] = {}  # resting order_id -> agent_id

    def _emit(self, event: OrderEvent):
        self.trace.events.append(event)
        self.recent.append(event)

    def _notify_fills(self, now, fills, taker_side, taker_id, taker_agent,
                      taker_size):
        """Emit maker+taker EXECUTE rows and fill notices for each trade."""
        emit = self._emit
        send = self.kernel.send
        book = self.book
        maker_side = SELL if taker_side == BUY else BUY
        taker_done = 0
        for fill in fills:
            maker = book.get(fill.maker_order_id)
            maker_remaining = maker.remaining if maker is not None else 0
            maker_agent = self._owner[fill.maker_order_id]
            if maker_remaining == 0:
                del self._owner[fill.maker_order_id]
            taker_done += fill.size
            emit(OrderEvent(now, EXECUTE, fill.maker_order_id, maker_agent,
                            maker_side, fill.price, fill.size))
            emit(OrderEvent(now, EXECUTE, taker_id, taker_agent, taker_side,
                            fill.price, fill.size))
            send(self.agent_id, maker_agent,
                 FillNotice(fill.maker_order_id, maker_side, fill.price,
                            fill.size, maker_remaining))
            send(self.agent_id, taker_agent,
                 FillNotice(taker_id, taker_side, fill.price, fill.size,
                            taker_size - taker_done))
            self.last_trade_price = fill.price

    def on_message(self, now, sender_id, payload):
        book = self.book
        kind = type(payload)
        if kind is LimitOrderRequest:
            self._emit(OrderEvent(now, SUBMIT_LIMIT, payload.order_id, sender_id,
                                  payload.side, payload.price, payload.size))
            order = Order(payload.order_id, sender_id, payload.side,
                          payload.price, payload.size, now)
            fills = book.submit_limit(order)
            if order.remaining > 0:
                self._owner[payload.order_id] = sender_id
            if fills:
                self._notify_fills(now, fills, payload.side, payload.order_id,
                                   sender_id, payload.size)
        elif kind is DepthQuery:
            if payload.n_levels == 1:
                b, a, vb, va = book.best_quotes()
                bids = ((b, vb),) if b is not None else ()
                asks = ((a, va),) if a is not None else ()
            else:
                bids, asks = book.depth(payload.n_levels)
            events = ()
            if payload.include_events:
                recent = self.recent
                n = payload.include_events
                events = tuple(recent)[-n:] if len(recent) > n else tuple(recent)
            self.kernel.send(self.agent_id, sender_id,
                             DepthReply(tuple(bids), tuple(asks), events))
        elif kind is CancelRequest:
            order = book.get(payload.order_id)
            if order is not None:
                canceled = book.cancel(payload.order_id)
                agent = self._owner.pop(payload.order_id)
                self._emit(OrderEvent(now, CANCEL, payload.order_id, agent,
                                      order.side, order.price, canceled))
        elif kind is MarketOrderRequest:
            self._emit(OrderEvent(now, SUBMIT_MARKET, payload.order_id, sender_id,
                                  payload.side, 0, payload.size))
            result = book.submit_market(payload.side, payload.size, now,
                                        payload.order_id, sender_id)
            if result.fills:
                self._notify_fills(now, result.fills, payload.side,
                                   payload.order_id, sender_id, payload.size)
        elif kind is LastTradeQuery:
            self.kernel.send(self.agent_id, sender_id,
                             LastTradeReply(self.last_trade_price))
        else:
            raise ValueError(f"exchange cannot handle {payload!r}")
