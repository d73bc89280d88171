"""Deliberately naive reference implementations used as test oracles.

The matcher keeps every resting order in one flat list and linear-scans
for the best price on each step, so it shares no code or data-structure
assumptions with the real engine.
"""

from lobsim.book import BUY, SELL, Fill


class NaiveBook:
    """Flat-list continuous double auction with price, then arrival order."""

    def __init__(self):
        self.resting = []  # (arrival_seq, dict) in submission order
        self._arrivals = 0

    def _best(self, side):
        cands = [(seq, o) for seq, o in self.resting if o["side"] == side]
        if not cands:
            return None
        if side == SELL:
            price = min(o["price"] for _, o in cands)
        else:
            price = max(o["price"] for _, o in cands)
        at_price = [(seq, o) for seq, o in cands if o["price"] == price]
        return min(at_price, key=lambda t: t[0])

    def _take(self, taker_side, taker_id, size, timestamp, limit):
        opposite = SELL if taker_side == BUY else BUY
        fills = []
        while size > 0:
            best = self._best(opposite)
            if best is None:
                break
            _, maker = best
            if limit is not None:
                if taker_side == BUY and maker["price"] > limit:
                    break
                if taker_side == SELL and maker["price"] < limit:
                    break
            take = min(size, maker["remaining"])
            fills.append(Fill(maker["order_id"], taker_id, maker["price"],
                              take, timestamp))
            maker["remaining"] -= take
            size -= take
            if maker["remaining"] == 0:
                self.resting = [(s, o) for s, o in self.resting
                                if o["order_id"] != maker["order_id"]]
        return fills, size

    def submit_limit(self, order_id, agent_id, side, price, size, timestamp):
        fills, leftover = self._take(side, order_id, size, timestamp, price)
        if leftover > 0:
            self._arrivals += 1
            self.resting.append((self._arrivals, {
                "order_id": order_id, "agent_id": agent_id, "side": side,
                "price": price, "remaining": leftover}))
        return fills

    def submit_market(self, order_id, agent_id, side, size, timestamp):
        return self._take(side, order_id, size, timestamp, None)

    def cancel(self, order_id):
        for seq, o in self.resting:
            if o["order_id"] == order_id:
                self.resting = [(s, x) for s, x in self.resting
                                if x["order_id"] != order_id]
                return o["remaining"]
        return None

    def best_quotes(self):
        bb = self._best(BUY)
        ba = self._best(SELL)
        b = bb[1]["price"] if bb else None
        a = ba[1]["price"] if ba else None
        vb = sum(o["remaining"] for _, o in self.resting
                 if o["side"] == BUY and o["price"] == b) if b is not None else None
        va = sum(o["remaining"] for _, o in self.resting
                 if o["side"] == SELL and o["price"] == a) if a is not None else None
        return b, a, vb, va

    def snapshot(self):
        """Resting orders as a sorted, comparable list."""
        return sorted((o["order_id"], o["side"], o["price"], o["remaining"])
                      for _, o in self.resting)


def random_event_stream(rng, n_events, mid=10000, n_agents=5):
    """A reproducible stream of mixed order-book operations."""
    stream = []
    next_id = 1
    live_ids = []
    for i in range(n_events):
        roll = rng.random()
        timestamp = i  # strictly increasing, 1 ns apart
        if roll < 0.55 or not live_ids:
            side = BUY if rng.random() < 0.5 else SELL
            price = max(1, mid + rng.randint(-30, 30))
            size = rng.randint(1, 200)
            stream.append(("limit", next_id, rng.randint(1, n_agents), side,
                           price, size, timestamp))
            live_ids.append(next_id)
            next_id += 1
        elif roll < 0.72:
            side = BUY if rng.random() < 0.5 else SELL
            size = rng.randint(1, 150)
            stream.append(("market", next_id, rng.randint(1, n_agents), side,
                           size, timestamp))
            next_id += 1
        else:
            # cancels may target already-gone ids on purpose
            target = rng.choice(live_ids)
            stream.append(("cancel", target, timestamp))
            if rng.random() < 0.8:
                live_ids.remove(target)
    return stream


def apply_stream(stream, fast_book, naive_book):
    """Feed both engines one stream; returns (fast fills, naive fills, totals)."""
    from lobsim.book import Order

    fast_fills, naive_fills = [], []
    submitted = 0
    canceled = 0
    discarded = 0
    for op in stream:
        if op[0] == "limit":
            _, oid, aid, side, price, size, ts = op
            submitted += size
            fast_fills.extend(fast_book.submit_limit(Order(oid, aid, side, price, size, ts)))
            naive_fills.extend(naive_book.submit_limit(oid, aid, side, price, size, ts))
        elif op[0] == "market":
            _, oid, aid, side, size, ts = op
            submitted += size
            result = fast_book.submit_market(side, size, ts, oid, aid)
            fast_fills.extend(result.fills)
            discarded += result.unfilled
            nf, _ = naive_book.submit_market(oid, aid, side, size, ts)
            naive_fills.extend(nf)
        else:
            _, oid, ts = op
            got = fast_book.cancel(oid)
            naive_got = naive_book.cancel(oid)
            assert got == naive_got
            if got is not None:
                canceled += got
    return fast_fills, naive_fills, (submitted, canceled, discarded)
