"""Limit order book with price-then-FIFO matching.

Prices are integer cents, sizes integer shares, timestamps integer
nanoseconds. Trades always execute at the resting (maker) order's limit
price. The book keeps one FIFO queue per price level; cancels are lazy
(dead orders are skipped when the queue front is consumed) so cancel is
O(1) while level aggregates stay exact.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import NamedTuple, Optional

BUY = "BUY"
SELL = "SELL"


class OrderRejected(ValueError):
    """Raised for invalid submissions (bad size/price, duplicate id)."""


class Fill(NamedTuple):
    maker_order_id: int
    taker_order_id: int
    price: int
    size: int
    timestamp: int


class MarketResult(NamedTuple):
    fills: list
    unfilled: int  # remainder discarded for lack of liquidity


class Order:
    """A resting or incoming order. `remaining` is mutated by matching."""

    __slots__ = ("order_id", "agent_id", "side", "price", "size",
                 "timestamp", "remaining", "alive")

    def __init__(self, order_id, agent_id, side, price, size, timestamp):
        self.order_id = order_id
        self.agent_id = agent_id
        self.side = side
        self.price = price
        self.size = size
        self.timestamp = timestamp
        self.remaining = size
        self.alive = True

    def __repr__(self):
        return (f"Order(id={self.order_id}, {self.side} {self.remaining}/"
                f"{self.size} @ {self.price}, t={self.timestamp})")


class _Level:
    __slots__ = ("queue", "total")

    def __init__(self):
        self.queue = deque()
        self.total = 0  # live resting size at this price


class LimitOrderBook:
    """Bids and asks keyed by price with FIFO queues per level.

    Best-price lookup uses lazy heaps: a price is pushed when its level is
    created and stale entries are discarded on peek.
    """

    def __init__(self):
        self._bids: dict[int, _Level] = {}
        self._asks: dict[int, _Level] = {}
        self._bid_heap: list[int] = []  # negated prices
        self._ask_heap: list[int] = []
        self._orders: dict[int, Order] = {}  # resting orders only

    # -- quotes ----------------------------------------------------------

    def best_bid(self) -> Optional[int]:
        heap, levels = self._bid_heap, self._bids
        while heap:
            price = -heap[0]
            if price in levels:
                return price
            heapq.heappop(heap)
        return None

    def best_ask(self) -> Optional[int]:
        heap, levels = self._ask_heap, self._asks
        while heap:
            price = heap[0]
            if price in levels:
                return price
            heapq.heappop(heap)
        return None

    def best_quotes(self):
        """(best bid, best ask, bid size, ask size); absent sides are None."""
        b = self.best_bid()
        a = self.best_ask()
        vb = self._bids[b].total if b is not None else None
        va = self._asks[a].total if a is not None else None
        return b, a, vb, va

    def mid(self) -> Optional[float]:
        """Mid-price in cents; exact to the half cent. None if one-sided."""
        b = self.best_bid()
        a = self.best_ask()
        if b is None or a is None:
            return None
        return (a + b) / 2

    def depth(self, n_levels: int):
        """Top-n (price, aggregate size) ladders, best-first per side."""
        if n_levels < 1:
            raise ValueError("n_levels must be >= 1")
        bids = sorted(self._bids.items(), key=lambda kv: -kv[0])[:n_levels]
        asks = sorted(self._asks.items())[:n_levels]
        return ([(p, lvl.total) for p, lvl in bids],
                [(p, lvl.total) for p, lvl in asks])

    # -- mutation --------------------------------------------------------

    def submit_limit(self, order: Order) -> list[Fill]:
        """Match the incoming limit order, resting any residual size."""
        if order.size <= 0:
            raise OrderRejected(f"non-positive size {order.size}")
        if order.price is None or order.price <= 0:
            raise OrderRejected(f"limit order needs a positive price, got {order.price}")
        if order.order_id in self._orders:
            raise OrderRejected(f"duplicate order_id {order.order_id}")

        if order.side == BUY:
            fills = self._match(order, self._asks, self._ask_heap, order.price)
        else:
            fills = self._match(order, self._bids, self._bid_heap, order.price)

        if order.remaining > 0:
            levels = self._bids if order.side == BUY else self._asks
            level = levels.get(order.price)
            if level is None:
                level = levels[order.price] = _Level()
                if order.side == BUY:
                    heapq.heappush(self._bid_heap, -order.price)
                else:
                    heapq.heappush(self._ask_heap, order.price)
            level.queue.append(order)
            level.total += order.remaining
            self._orders[order.order_id] = order
        return fills

    def submit_market(self, side, size, timestamp, taker_order_id,
                      agent_id=-1) -> MarketResult:
        """Consume opposite-side liquidity; unfilled remainder is discarded."""
        if size <= 0:
            raise OrderRejected(f"non-positive size {size}")
        order = Order(taker_order_id, agent_id, side, None, size, timestamp)
        if side == BUY:
            fills = self._match(order, self._asks, self._ask_heap, None)
        else:
            fills = self._match(order, self._bids, self._bid_heap, None)
        return MarketResult(fills, order.remaining)

    def _match(self, order, levels, heap, limit):
        """Walk the opposite side from the best price while it crosses `limit`
        (None means a market order: cross everything)."""
        bid_side = levels is self._bids
        fills = []
        remaining = order.remaining
        while remaining > 0:
            while heap:
                best = -heap[0] if bid_side else heap[0]
                if best in levels:
                    break
                heapq.heappop(heap)
            else:
                break
            if limit is not None and (best < limit if bid_side else best > limit):
                break
            level = levels[best]
            queue = level.queue
            while queue and remaining > 0:
                maker = queue[0]
                if not maker.alive:
                    queue.popleft()
                    continue
                take = maker.remaining if maker.remaining < remaining else remaining
                fills.append(Fill(maker.order_id, order.order_id, best, take,
                                  order.timestamp))
                maker.remaining -= take
                remaining -= take
                level.total -= take
                if maker.remaining == 0:
                    maker.alive = False
                    queue.popleft()
                    del self._orders[maker.order_id]
            if level.total == 0:
                del levels[best]
        order.remaining = remaining
        return fills

    def cancel(self, order_id) -> Optional[int]:
        """Remove a resting order; returns the canceled size, None if unknown."""
        order = self._orders.pop(order_id, None)
        if order is None:
            return None
        order.alive = False
        canceled = order.remaining
        order.remaining = 0
        levels = self._bids if order.side == BUY else self._asks
        level = levels[order.price]
        level.total -= canceled
        if level.total == 0:
            del levels[order.price]
        return canceled

    # -- inspection ------------------------------------------------------

    def __contains__(self, order_id) -> bool:
        return order_id in self._orders

    def get(self, order_id) -> Optional[Order]:
        return self._orders.get(order_id)

    def resting_volume(self) -> int:
        return sum(o.remaining for o in self._orders.values())

    def n_resting(self) -> int:
        return len(self._orders)

    def is_crossed(self) -> bool:
        b, a = self.best_bid(), self.best_ask()
        return b is not None and a is not None and b >= a
