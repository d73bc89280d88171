import random

import pytest

from lobsim.book import BUY, SELL, Fill, LimitOrderBook, Order, OrderRejected

from reference import NaiveBook, apply_stream, random_event_stream


def limit(book, oid, side, price, size, ts=0, agent=1):
    return book.submit_limit(Order(oid, agent, side, price, size, ts))


class TestSubmitLimit:
    def test_price_improvement_executes_at_resting_price(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 100, ts=1)
        fills = limit(book, 2, BUY, 10002, 50, ts=2)
        assert fills == [Fill(1, 2, 10001, 50, 2)]
        assert book.get(2) is None  # no residual

    def test_fifo_within_level(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 10, ts=1)
        limit(book, 2, SELL, 10001, 20, ts=2)
        fills = limit(book, 3, BUY, 10001, 15, ts=3)
        assert fills == [Fill(1, 3, 10001, 10, 3), Fill(2, 3, 10001, 5, 3)]
        assert book.get(2).remaining == 15

    def test_resting_order_becomes_best_bid(self):
        book = LimitOrderBook()
        fills = limit(book, 1, BUY, 10000, 100)
        assert fills == []
        assert book.best_quotes() == (10000, None, 100, None)

    def test_duplicate_id_rejected(self):
        book = LimitOrderBook()
        limit(book, 1, BUY, 10000, 100)
        with pytest.raises(OrderRejected, match="duplicate"):
            limit(book, 1, BUY, 9999, 10)

    def test_nonpositive_size_rejected(self):
        book = LimitOrderBook()
        with pytest.raises(OrderRejected):
            limit(book, 1, BUY, 10000, 0)

    def test_nonpositive_price_rejected(self):
        book = LimitOrderBook()
        with pytest.raises(OrderRejected):
            limit(book, 1, BUY, 0, 10)

    def test_partial_cross_rests_residual(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 30)
        fills = limit(book, 2, BUY, 10002, 50, ts=5)
        assert fills == [Fill(1, 2, 10001, 30, 5)]
        assert book.best_quotes() == (10002, None, 20, None)


class TestSubmitMarket:
    def test_direct_match(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 100)
        result = book.submit_market(BUY, 50, 3, taker_order_id=2)
        assert result.fills == [Fill(1, 2, 10001, 50, 3)]
        assert result.unfilled == 0

    def test_walks_the_book(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 30)
        limit(book, 2, SELL, 10002, 30)
        result = book.submit_market(BUY, 50, 4, taker_order_id=3)
        assert result.fills == [Fill(1, 3, 10001, 30, 4), Fill(2, 3, 10002, 20, 4)]

    def test_empty_side_reports_exhaustion(self):
        book = LimitOrderBook()
        result = book.submit_market(BUY, 10, 0, taker_order_id=1)
        assert result.fills == []
        assert result.unfilled == 10

    def test_remainder_not_rested(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 5)
        result = book.submit_market(BUY, 50, 1, taker_order_id=2)
        assert result.unfilled == 45
        assert book.best_quotes() == (None, None, None, None)


class TestCancel:
    def test_cancel_resting(self):
        book = LimitOrderBook()
        limit(book, 1, BUY, 10000, 100)
        assert book.cancel(1) == 100
        assert book.best_quotes() == (None, None, None, None)

    def test_cancel_partially_filled_returns_residual(self):
        book = LimitOrderBook()
        limit(book, 1, BUY, 10000, 100)
        book.submit_market(SELL, 40, 1, taker_order_id=2)
        assert book.cancel(1) == 60

    def test_cancel_unknown_id(self):
        book = LimitOrderBook()
        assert book.cancel(42) is None

    def test_cancel_preserves_fifo_of_remaining(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 10, ts=1)
        limit(book, 2, SELL, 10001, 20, ts=2)
        limit(book, 3, SELL, 10001, 30, ts=3)
        book.cancel(2)
        fills = limit(book, 4, BUY, 10001, 40, ts=4)
        assert [(f.maker_order_id, f.size) for f in fills] == [(1, 10), (3, 30)]


class TestQuotesAndDepth:
    def test_quotes_and_mid(self):
        book = LimitOrderBook()
        limit(book, 1, BUY, 10000, 100)
        limit(book, 2, SELL, 10002, 50)
        assert book.best_quotes() == (10000, 10002, 100, 50)
        assert book.mid() == 10001

    def test_half_cent_mid_is_exact(self):
        book = LimitOrderBook()
        limit(book, 1, BUY, 10000, 1)
        limit(book, 2, SELL, 10001, 1)
        assert book.mid() == 10000.5

    def test_empty_book_quotes_absent(self):
        book = LimitOrderBook()
        assert book.best_quotes() == (None, None, None, None)
        assert book.mid() is None

    def test_depth_aggregates_levels(self):
        book = LimitOrderBook()
        limit(book, 1, SELL, 10001, 30, ts=1)
        limit(book, 2, SELL, 10001, 20, ts=2)
        limit(book, 3, SELL, 10002, 10, ts=3)
        bids, asks = book.depth(2)
        assert bids == []
        assert asks == [(10001, 50), (10002, 10)]

    def test_depth_more_levels_than_available(self):
        book = LimitOrderBook()
        limit(book, 1, BUY, 9999, 5)
        bids, asks = book.depth(10)
        assert bids == [(9999, 5)]
        assert asks == []


class TestInvariants:
    def test_never_crossed_and_no_empty_levels_random_stream(self):
        rng = random.Random(1234)
        book = LimitOrderBook()
        naive = NaiveBook()
        stream = random_event_stream(rng, 2000)
        for i in range(0, len(stream), 50):
            apply_stream(stream[i:i + 50], book, naive)
            assert not book.is_crossed()
            for levels in (book._bids, book._asks):
                for price, level in levels.items():
                    assert level.total > 0

    def test_conservation_random_stream(self):
        # submitted == filled (once per trade) + canceled + resting + discarded
        rng = random.Random(99)
        book = LimitOrderBook()
        naive = NaiveBook()
        stream = random_event_stream(rng, 12_000)
        fast_fills, _, (submitted, canceled, discarded) = apply_stream(
            stream, book, naive)
        filled = sum(f.size for f in fast_fills)
        resting = book.resting_volume()
        assert submitted == 2 * filled + canceled + resting + discarded

    def test_matches_naive_reference_on_random_streams(self):
        for seed in range(30):
            rng = random.Random(seed)
            book = LimitOrderBook()
            naive = NaiveBook()
            stream = random_event_stream(rng, 400)
            fast_fills, naive_fills, _ = apply_stream(stream, book, naive)
            assert fast_fills == naive_fills
            fast_snapshot = sorted((o.order_id, o.side, o.price, o.remaining)
                                   for o in book._orders.values())
            assert fast_snapshot == naive.snapshot()
            assert book.best_quotes() == naive.best_quotes()
