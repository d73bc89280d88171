import gzip
import json

import pytest

from lobsim.config import preset, run_simulation
from lobsim.events import EventTrace, OrderEvent
from lobsim.ingest import (EventLogError, HEADER, read_event_log, read_report,
                           trace_to_csv_bytes, write_event_log, write_report)


def small_trace():
    return EventTrace([
        OrderEvent(100, "SUBMIT_LIMIT", 1, 3, "BUY", 10_000, 50),
        OrderEvent(200, "SUBMIT_LIMIT", 2, 4, "SELL", 10_000, 20),
        OrderEvent(200, "EXECUTE", 1, 3, "BUY", 10_000, 20),
        OrderEvent(200, "EXECUTE", 2, 4, "SELL", 10_000, 20),
        OrderEvent(900, "CANCEL", 1, 3, "BUY", 10_000, 30),
    ], session_open_ns=0, session_close_ns=1000)


class TestRoundTrip:
    def test_write_read_identity(self, tmp_path):
        path = tmp_path / "events.csv"
        trace = small_trace()
        write_event_log(trace, path)
        back = read_event_log(path)
        assert back.events == trace.events

    def test_gzip_round_trip(self, tmp_path):
        path = tmp_path / "events.csv.gz"
        trace = small_trace()
        write_event_log(trace, path)
        with gzip.open(path, "rt") as fh:
            assert fh.readline().strip() == ",".join(HEADER)
        assert read_event_log(path).events == trace.events

    def test_simulator_trace_round_trip_bit_exact(self, tmp_path):
        cfg = preset("sparse_zi_100")
        cfg.session_close = "09:35:00"
        trace = run_simulation(cfg, 2)
        path = tmp_path / "sim.csv"
        write_event_log(trace, path)
        back = read_event_log(path)
        assert back.events == trace.events
        # writing the re-read trace reproduces the same bytes
        assert trace_to_csv_bytes(back) == path.read_bytes()

    def test_empty_file_with_header_gives_empty_trace(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(",".join(HEADER) + "\n")
        assert len(read_event_log(path)) == 0


class TestValidation:
    def _write_rows(self, tmp_path, rows):
        path = tmp_path / "bad.csv"
        path.write_text("\n".join([",".join(HEADER)] + rows) + "\n")
        return path

    def test_bad_header_aborts(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b,c\n")
        with pytest.raises(EventLogError, match="bad header"):
            read_event_log(path)

    def test_missing_file_errors(self, tmp_path):
        with pytest.raises(OSError):
            read_event_log(tmp_path / "nope.csv")

    def test_zero_size_strict_abort_lenient_drop(self, tmp_path):
        rows = ["100,SUBMIT_LIMIT,1,1,BUY,10000,50",
                "200,SUBMIT_LIMIT,2,1,BUY,10000,0"]
        path = self._write_rows(tmp_path, rows)
        with pytest.raises(EventLogError, match="bad.csv:3"):
            read_event_log(path, strict=True)
        trace = read_event_log(path, strict=False)
        assert len(trace) == 1
        assert trace.dropped_rows == 1

    def test_decreasing_timestamp_strict_abort(self, tmp_path):
        rows = ["200,SUBMIT_LIMIT,1,1,BUY,10000,50",
                "100,SUBMIT_LIMIT,2,1,BUY,10000,50"]
        path = self._write_rows(tmp_path, rows)
        with pytest.raises(EventLogError, match="decreasing timestamp"):
            read_event_log(path)

    def test_unknown_event_type_aborts(self, tmp_path):
        rows = ["100,TRADE,1,1,BUY,10000,50"]
        path = self._write_rows(tmp_path, rows)
        with pytest.raises(EventLogError, match="unknown event_type"):
            read_event_log(path)


class TestReports:
    def test_single_metric_report_round_trip(self, tmp_path):
        report = {"returns.kurtosis.1m": {"value": 4.2, "sample_count": 419,
                                          "warnings": []}}
        path = tmp_path / "report.json"
        write_report(report, path)
        assert read_report(path) == report
        assert json.loads(path.read_text()) == report

    def test_reports_serialize_deterministically(self, tmp_path):
        report = {"b": {"value": 1}, "a": {"value": 2}}
        p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
        write_report(report, p1)
        write_report({"a": {"value": 2}, "b": {"value": 1}}, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_nan_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_report({"x": float("nan")}, tmp_path / "r.json")

    def test_unwritable_path_errors(self, tmp_path):
        with pytest.raises(OSError):
            write_report({}, tmp_path / "no" / "dir" / "r.json")
