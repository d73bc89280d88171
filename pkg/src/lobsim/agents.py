"""Background trading agents and the exogenous fundamental-value process.

Four behaviors: zero-intelligence (ZI) traders driven by a noisy
observation of the fundamental, heuristic belief learners (HBL) that
estimate transaction probabilities from a recent order-stream window,
a ladder-quoting market maker, and moving-average momentum traders.
Every agent draws from its own deterministic RNG stream seeded from
(master seed, agent id), so populations can change without perturbing
other agents' behavior.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass
from random import Random
from typing import Optional

from .book import BUY, SELL
from .events import EXECUTE, SUBMIT_LIMIT
from .kernel import (Agent, CancelRequest, DepthQuery, DepthReply, EXCHANGE_ID,
                     FillNotice, LimitOrderRequest, MarketOrderRequest)

_ORDER_ID_STRIDE = 1_000_000_000


# -- fundamental value ---------------------------------------------------

class FundamentalProcess:
    """Discrete mean-reverting value in integer cents.

    Each step: value <- max(0, round(kappa*mean + (1-kappa)*value + eps)),
    eps ~ Normal(0, shock_std^2). Advanced lazily to the queried time so
    the draw count is independent of how many agents observe it.
    """

    def __init__(self, mean: int, kappa: float, shock_std: float,
                 step_ns: int, rng: Random, start_value: Optional[int] = None):
        if not 0.0 <= kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        if step_ns <= 0:
            raise ValueError("step_ns must be positive")
        self.mean = mean
        self.kappa = kappa
        self.shock_std = shock_std
        self.step_ns = step_ns
        self.rng = rng
        self.value = mean if start_value is None else start_value
        self._steps_done = 0

    def step(self) -> int:
        drift = self.kappa * self.mean + (1.0 - self.kappa) * self.value
        if self.shock_std > 0.0:
            drift += self.rng.gauss(0.0, self.shock_std)
        self.value = max(0, round(drift))
        self._steps_done += 1
        return self.value

    def value_at(self, t_ns: int) -> int:
        due = t_ns // self.step_ns
        while self._steps_done < due:
            self.step()
        return self.value


def fundamental_step(value: int, mean: int, kappa: float, shock_std: float,
                     rng: Random) -> int:
    """One transition of the fundamental process (stateless form)."""
    eps = rng.gauss(0.0, shock_std) if shock_std > 0.0 else 0.0
    return max(0, round(kappa * mean + (1.0 - kappa) * value + eps))


# -- parameter blocks ----------------------------------------------------

@dataclass
class ZIParams:
    arrival_rate: float = 0.1        # expected orders/second (Poisson)
    obs_noise_std: float = 10.0      # stddev of observation noise, cents
    surplus_min: int = 0             # requested surplus R range, cents
    surplus_max: int = 50
    size_min: int = 1
    size_max: int = 100

    def validate(self):
        if self.arrival_rate <= 0:
            raise ValueError("arrival_rate must be > 0")
        if self.surplus_min > self.surplus_max:
            raise ValueError("surplus_min > surplus_max")
        if self.size_min < 1 or self.size_min > self.size_max:
            raise ValueError("bad size range")


@dataclass
class HBLParams(ZIParams):
    memory_length: int = 60  # most recent order events considered

    def validate(self):
        super().validate()
        if self.memory_length < 1:
            raise ValueError("memory_length must be >= 1")


@dataclass
class MMParams:
    wake_interval_ns: int = 10_000_000_000
    levels: int = 5                  # price levels quoted per side
    size_min: int = 100              # total size per side, shares
    size_max: int = 500

    def validate(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.size_min < self.levels:
            raise ValueError("size_min must allow one share per level")
        if self.size_min > self.size_max:
            raise ValueError("size_min > size_max")


@dataclass
class MomentumParams:
    short_window: int = 20
    long_window: int = 50
    size_min: int = 1
    size_max: int = 50
    wake_interval_ns: int = 1_000_000_000
    use_market_orders: bool = False  # default: marketable limit at the touch

    def validate(self):
        if not 0 < self.short_window < self.long_window:
            raise ValueError("need 0 < short_window < long_window")
        if self.size_min < 1 or self.size_min > self.size_max:
            raise ValueError("bad size range")


# -- pure decision functions (unit-testable without a kernel) ------------

def zi_decide(observation: int, params: ZIParams, rng: Random):
    """(side, limit price, size) for one zero-intelligence order.

    Side is a fair coin; the agent demands surplus R ~ U[min, max] by
    bidding observation - R or asking observation + R. Never looks at the
    book.
    """
    side = BUY if rng.random() < 0.5 else SELL
    surplus = rng.randint(params.surplus_min, params.surplus_max)
    price = observation - surplus if side == BUY else observation + surplus
    if price < 1:
        price = 1
    size = rng.randint(params.size_min, params.size_max)
    return side, price, size


def momentum_decide(mids, short_window: int, long_window: int) -> Optional[str]:
    """BUY when the short moving average exceeds the long one, else SELL.

    Returns None until `long_window` observations are available.
    """
    if len(mids) < long_window:
        return None
    short = sum(mids[-short_window:]) / short_window
    long = sum(mids[-long_window:]) / long_window
    return BUY if short > long else SELL


def mm_ladder(best_bid: int, best_ask: int, levels: int, bid_total: int,
              ask_total: int):
    """Quote ladder: `levels` ticks outward from each inside quote.

    Total size per side is split as equally as possible, with the whole
    remainder assigned to the innermost level.
    """
    orders = []
    for side, anchor, step, total in ((BUY, best_bid, -1, bid_total),
                                      (SELL, best_ask, +1, ask_total)):
        base, rem = divmod(total, levels)
        for i in range(levels):
            size = base + rem if i == 0 else base
            price = anchor + step * i
            if price >= 1 and size > 0:
                orders.append((side, price, size))
    return orders


def _classify_history(history):
    """Split a window of order events into sorted submission price lists.

    Returns (transacted bids, untransacted bids, all asks,
             transacted asks, untransacted asks, all bids), each sorted.
    A submission counts as transacted when the same order id has an
    EXECUTE record anywhere inside the window.
    """
    # hot path: positional access into OrderEvent
    # (ts, event_type, order_id, agent_id, side, price_cents, size)
    executed = set()
    add = executed.add
    for ev in history:
        if ev[1] == EXECUTE:
            add(ev[2])
    tb, ub, ta, ua = [], [], [], []
    for ev in history:
        if ev[1] != SUBMIT_LIMIT:
            continue
        if ev[4] == BUY:
            (tb if ev[2] in executed else ub).append(ev[5])
        else:
            (ta if ev[2] in executed else ua).append(ev[5])
    for lst in (tb, ub, ta, ua):
        lst.sort()
    bids = sorted(tb + ub)
    asks = sorted(ta + ua)
    return tb, ub, asks, ta, ua, bids


def hbl_belief(history, price: int, side: str) -> float:
    """Estimated probability that a limit order at `price` transacts.

    Frequency estimate over the event window: for a buy, orders priced at
    or below `price` that did transact (plus asks seen at or below it)
    count in favor; buy submissions at or above it that never transacted
    count against. 0/0 is defined as 0.
    """
    tb, ub, asks, ta, ua, bids = _classify_history(history)
    if side == BUY:
        favor = bisect_right(tb, price) + bisect_right(asks, price)
        against = len(ub) - bisect_left(ub, price)
    else:
        favor = (len(ta) - bisect_left(ta, price)) + (len(bids) - bisect_left(bids, price))
        against = bisect_right(ua, price)
    total = favor + against
    return favor / total if total else 0.0


def hbl_choose(history, valuation: int, side: str, extra_prices=()):
    """Price maximizing belief * surplus over observed candidate prices.

    Candidates are the distinct submission prices in the window plus any
    supplied inside quotes. Returns (price, expected_surplus), or None when
    the window holds no candidates or no candidate has positive expected
    surplus.
    """
    tb, ub, asks, ta, ua, bids = _classify_history(history)
    candidates = set(bids)
    candidates.update(asks)
    candidates.update(p for p in extra_prices if p is not None)
    if not candidates:
        return None
    best = None
    if side == BUY:
        n_ub = len(ub)
        for p in sorted(candidates):
            favor = bisect_right(tb, p) + bisect_right(asks, p)
            against = n_ub - bisect_left(ub, p)
            total = favor + against
            belief = favor / total if total else 0.0
            expected = belief * (valuation - p)
            if best is None or expected > best[1]:
                best = (p, expected)
    else:
        for p in sorted(candidates, reverse=True):
            favor = (len(ta) - bisect_left(ta, p)) + (len(bids) - bisect_left(bids, p))
            total = favor + bisect_right(ua, p)
            belief = favor / total if total else 0.0
            expected = belief * (p - valuation)
            if best is None or expected > best[1]:
                best = (p, expected)
    if best[1] <= 0:
        return None
    return best


# -- kernel-driven agents -------------------------------------------------

class PoissonTradingAgent(Agent):
    """Shared machinery: Poisson wakeups, one outstanding order, cancel-first."""

    def __init__(self, agent_id, params, fundamental, rng):
        super().__init__(agent_id)
        self.params = params
        self.fundamental = fundamental
        self.rng = rng
        self._next_order_id = agent_id * _ORDER_ID_STRIDE
        self._outstanding: Optional[int] = None

    def _gap_ns(self) -> int:
        return int(self.rng.expovariate(self.params.arrival_rate) * 1e9) + 1

    def _new_order_id(self) -> int:
        self._next_order_id += 1
        return self._next_order_id

    def observe(self, now: int) -> int:
        noise = self.rng.gauss(0.0, self.params.obs_noise_std)
        return max(1, round(self.fundamental.value_at(now) + noise))

    def cancel_outstanding(self):
        if self._outstanding is not None:
            self.kernel.send(self.agent_id, EXCHANGE_ID,
                             CancelRequest(self._outstanding))
            self._outstanding = None

    def submit_limit(self, side, price, size):
        oid = self._new_order_id()
        self.kernel.send(self.agent_id, EXCHANGE_ID,
                         LimitOrderRequest(oid, side, price, size))
        self._outstanding = oid
        return oid

    def on_message(self, now, sender_id, payload):
        if type(payload) is FillNotice:
            if payload.order_id == self._outstanding and payload.remaining == 0:
                self._outstanding = None


class ZIAgent(PoissonTradingAgent):
    def on_start(self, open_ns, close_ns):
        self.kernel.schedule_wakeup(self.agent_id, open_ns + self._gap_ns())

    def on_wakeup(self, now):
        self.kernel.schedule_wakeup(self.agent_id, now + self._gap_ns())
        self.cancel_outstanding()
        side, price, size = zi_decide(self.observe(now), self.params, self.rng)
        self.submit_limit(side, price, size)


class HBLAgent(PoissonTradingAgent):
    """ZI-style arrivals, but the limit price maximizes belief * surplus."""

    def on_start(self, open_ns, close_ns):
        self.kernel.schedule_wakeup(self.agent_id, open_ns + self._gap_ns())

    def on_wakeup(self, now):
        self.kernel.schedule_wakeup(self.agent_id, now + self._gap_ns())
        self.cancel_outstanding()
        self.kernel.send(self.agent_id, EXCHANGE_ID,
                         DepthQuery(1, self.params.memory_length))

    def on_message(self, now, sender_id, payload):
        if type(payload) is not DepthReply:
            super().on_message(now, sender_id, payload)
            return
        valuation = self.observe(now)
        side = BUY if self.rng.random() < 0.5 else SELL
        size = self.rng.randint(self.params.size_min, self.params.size_max)
        choice = None
        if payload.events:
            inside = (payload.bids[0][0] if payload.bids else None,
                      payload.asks[0][0] if payload.asks else None)
            choice = hbl_choose(payload.events, valuation, side, inside)
        if choice is not None:
            price = choice[0]
        else:
            # empty window or no candidate worth taking: fall back to ZI pricing
            surplus = self.rng.randint(self.params.surplus_min, self.params.surplus_max)
            price = valuation - surplus if side == BUY else valuation + surplus
        self.submit_limit(side, max(1, price), size)


class MarketMakerAgent(Agent):
    """Cancels its book, reads the inside quotes, re-quotes a ladder."""

    def __init__(self, agent_id, params: MMParams, rng: Random):
        super().__init__(agent_id)
        self.params = params
        self.rng = rng
        self._next_order_id = agent_id * _ORDER_ID_STRIDE
        self._outstanding: set[int] = set()

    def on_start(self, open_ns, close_ns):
        self.kernel.schedule_wakeup(self.agent_id, open_ns)

    def on_wakeup(self, now):
        self.kernel.schedule_wakeup(self.agent_id, now + self.params.wake_interval_ns)
        send = self.kernel.send
        for oid in sorted(self._outstanding):
            send(self.agent_id, EXCHANGE_ID, CancelRequest(oid))
        self._outstanding.clear()
        send(self.agent_id, EXCHANGE_ID, DepthQuery(1, 0))

    def on_message(self, now, sender_id, payload):
        kind = type(payload)
        if kind is DepthReply:
            if not payload.bids or not payload.asks:
                return  # one-sided book: sit this wakeup out
            p = self.params
            bid_total = self.rng.randint(p.size_min, p.size_max)
            ask_total = self.rng.randint(p.size_min, p.size_max)
            for side, price, size in mm_ladder(payload.bids[0][0],
                                               payload.asks[0][0],
                                               p.levels, bid_total, ask_total):
                self._next_order_id += 1
                oid = self._next_order_id
                self.kernel.send(self.agent_id, EXCHANGE_ID,
                                 LimitOrderRequest(oid, side, price, size))
                self._outstanding.add(oid)
        elif kind is FillNotice:
            if payload.remaining == 0:
                self._outstanding.discard(payload.order_id)


class MomentumAgent(Agent):
    """Compares short vs long mid-price moving averages at a fixed cadence."""

    def __init__(self, agent_id, params: MomentumParams, rng: Random):
        super().__init__(agent_id)
        self.params = params
        self.rng = rng
        self._next_order_id = agent_id * _ORDER_ID_STRIDE
        self._mids = deque(maxlen=params.long_window)

    def on_start(self, open_ns, close_ns):
        offset = self.rng.randrange(self.params.wake_interval_ns)
        self.kernel.schedule_wakeup(self.agent_id, open_ns + offset)

    def on_wakeup(self, now):
        self.kernel.schedule_wakeup(self.agent_id, now + self.params.wake_interval_ns)
        self.kernel.send(self.agent_id, EXCHANGE_ID, DepthQuery(1, 0))

    def on_message(self, now, sender_id, payload):
        if type(payload) is not DepthReply:
            return
        if not payload.bids or not payload.asks:
            return
        best_bid = payload.bids[0][0]
        best_ask = payload.asks[0][0]
        self._mids.append((best_bid + best_ask) / 2)
        p = self.params
        side = momentum_decide(tuple(self._mids), p.short_window, p.long_window)
        if side is None:
            return
        size = self.rng.randint(p.size_min, p.size_max)
        self._next_order_id += 1
        oid = self._next_order_id
        if p.use_market_orders:
            self.kernel.send(self.agent_id, EXCHANGE_ID,
                             MarketOrderRequest(oid, side, size))
        else:
            price = best_ask if side == BUY else best_bid
            self.kernel.send(self.agent_id, EXCHANGE_ID,
                             LimitOrderRequest(oid, side, price, size))
