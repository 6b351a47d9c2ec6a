from __future__ import annotations

import json
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridpulse.errors import (
    GeocoderError,
    OutOfOrderSnapshot,
    SnapshotParseError,
    SnapshotValidationError,
    SourceError,
    SourceExhausted,
)
from gridpulse.ingest import (
    FetchedSnapshot,
    ReplayDirectorySource,
    parse_snapshot,
    reconcile,
    run_poll_cycle,
)
from gridpulse.store import OutageStore

from conftest import make_snapshot, make_zip_info, ts


def snapshot_json(ids, captured="2021-01-01T00:00:00Z", reported="2021-01-01T00:00:00Z"):
    return json.dumps(
        {
            "captured_at": captured,
            "reports": [
                {
                    "source_id": i,
                    "address": "1 Main St",
                    "reported_at": reported,
                    "cause": None,
                    "customers_affected": None,
                }
                for i in ids
            ],
        }
    ).encode()


class TestParseSnapshot:
    def test_empty_report_list(self):
        snap = parse_snapshot(snapshot_json([]))
        assert snap.reports == ()
        assert snap.captured_at == datetime(2021, 1, 1, tzinfo=timezone.utc)

    def test_single_record_round_trip(self):
        snap = parse_snapshot(snapshot_json(["x1"]))
        assert snap.reports[0].source_id == "x1"
        assert snap.reports[0].address == "1 Main St"
        assert snap.reports[0].reported_at == datetime(2021, 1, 1, tzinfo=timezone.utc)

    def test_duplicate_source_id_rejected(self):
        with pytest.raises(SnapshotValidationError, match="duplicate"):
            parse_snapshot(snapshot_json(["x", "x"]))

    def test_malformed_json_names_problem(self):
        with pytest.raises(SnapshotParseError):
            parse_snapshot(b"{nope")

    def test_first_offending_record_named(self):
        doc = {
            "captured_at": "2021-01-01T00:00:00Z",
            "reports": [
                {"source_id": "a", "address": "1 Main St", "reported_at": "2021-01-01T00:00:00Z"},
                {"source_id": "b", "address": "2 Main St"},
            ],
        }
        with pytest.raises(SnapshotParseError, match="record 1"):
            parse_snapshot(json.dumps(doc).encode())

    def test_unknown_fields_ignored(self):
        doc = json.loads(snapshot_json(["a"]))
        doc["reports"][0]["mystery"] = 42
        doc["extra"] = "ignored"
        snap = parse_snapshot(json.dumps(doc).encode())
        assert snap.reports[0].source_id == "a"

    def test_future_reported_at_rejected(self):
        raw = snapshot_json(["a"], captured="2021-01-01T00:00:00Z",
                            reported="2021-01-02T00:00:00Z")
        with pytest.raises(SnapshotValidationError, match="capture time"):
            parse_snapshot(raw)

    def test_empty_source_id_rejected(self):
        with pytest.raises(SnapshotValidationError, match="source_id"):
            parse_snapshot(snapshot_json([""]))

    def test_csv_variant(self):
        raw = (
            "source_id,address,reported_at,cause,customers_affected\n"
            'a1,"1 Main St, Queens",2021-01-01T00:00:00Z,weather,12\n'
        ).encode()
        snap = parse_snapshot(raw, format="csv", captured_at=ts(0))
        assert snap.reports[0].address == "1 Main St, Queens"
        assert snap.reports[0].cause == "weather"
        assert snap.reports[0].customers_affected == 12

    def test_csv_requires_captured_at(self):
        raw = b"source_id,address,reported_at,cause,customers_affected\n"
        with pytest.raises(SnapshotParseError, match="captured_at"):
            parse_snapshot(raw, format="csv")

    def test_csv_header_must_match(self):
        with pytest.raises(SnapshotParseError, match="header"):
            parse_snapshot(b"id,addr\n1,x\n", format="csv", captured_at=ts(0))


class TestReconcile:
    def test_new_outage_promoted(self):
        plan = reconcile(make_snapshot({"A"}), frozenset())
        assert plan.to_promote_processed == {"A"}
        assert plan.to_retire_historical == frozenset()
        assert plan.to_insert_crawled == {"A"}

    def test_vanished_outage_retired(self):
        plan = reconcile(make_snapshot(set()), frozenset({"A"}))
        assert plan.to_promote_processed == frozenset()
        assert plan.to_retire_historical == {"A"}

    def test_steady_state(self):
        plan = reconcile(make_snapshot({"A"}), frozenset({"A"}))
        assert plan.to_promote_processed == frozenset()
        assert plan.to_retire_historical == frozenset()

    def test_retirement_stamps_snapshot_time(self):
        plan = reconcile(make_snapshot(set(), minutes=90), frozenset({"A"}))
        assert plan.captured_at == ts(90)

    @settings(max_examples=100)
    @given(
        st.frozensets(st.text(alphabet="abcdef", min_size=1, max_size=2), max_size=8),
        st.frozensets(st.text(alphabet="abcdef", min_size=1, max_size=2), max_size=8),
    )
    def test_promote_and_retire_disjoint(self, snapshot_ids, processed):
        plan = reconcile(make_snapshot(snapshot_ids), processed)
        assert not (plan.to_promote_processed & plan.to_retire_historical)
        assert plan.to_promote_processed <= snapshot_ids
        assert plan.to_retire_historical <= processed

    @settings(max_examples=50)
    @given(st.frozensets(st.text(alphabet="abc", min_size=1, max_size=2), max_size=6))
    def test_replaying_same_snapshot_is_idempotent(self, ids):
        snap = make_snapshot(ids)
        first = reconcile(snap, frozenset())
        # after applying, the processed set equals the snapshot ids
        second = reconcile(snap, first.to_promote_processed)
        assert second.to_promote_processed == frozenset()
        assert second.to_retire_historical == frozenset()


class FakeSource:
    def __init__(self, payloads):
        self._payloads = list(payloads)

    def fetch(self):
        item = self._payloads.pop(0)
        if isinstance(item, Exception):
            raise item
        return FetchedSnapshot(raw=item, format="json")


class FakeGeocoder:
    def __init__(self, fail_addresses=(), error_addresses=()):
        self.fail = set(fail_addresses)
        self.error = set(error_addresses)
        self.info = make_zip_info()

    def resolve(self, address):
        if address in self.error:
            raise GeocoderError("backend down")
        if address in self.fail:
            return None
        return self.info


class TestRunPollCycle:
    def test_empty_snapshot_empty_store(self):
        store = OutageStore()
        report = run_poll_cycle(FakeSource([snapshot_json([])]), store, FakeGeocoder())
        assert (report.inserted, report.promoted, report.retired) == (0, 0, 0)
        assert report.ok

    def test_single_new_outage(self):
        store = OutageStore()
        report = run_poll_cycle(FakeSource([snapshot_json(["A"])]), store, FakeGeocoder())
        assert (report.inserted, report.promoted, report.retired) == (1, 1, 0)
        assert store.processed_source_ids() == {"A"}

    def test_source_failure_leaves_store_unchanged(self):
        store = OutageStore()
        report = run_poll_cycle(
            FakeSource([SourceError("unreachable")]), store, FakeGeocoder()
        )
        assert len(report.source_errors) == 1
        assert store.processed_source_ids() == frozenset()
        assert store.last_captured_at() is None

    def test_enrichment_failure_isolated_and_retried(self):
        store = OutageStore()
        # two outages share the snapshot; one address cannot be resolved
        doc = {
            "captured_at": "2021-01-01T00:00:00Z",
            "reports": [
                {"source_id": "A", "address": "1 Main St", "reported_at": "2021-01-01T00:00:00Z"},
                {"source_id": "B", "address": "bad addr", "reported_at": "2021-01-01T00:00:00Z"},
            ],
        }
        geocoder = FakeGeocoder(fail_addresses={"bad addr"})
        report = run_poll_cycle(FakeSource([json.dumps(doc).encode()]), store, geocoder)
        assert report.promoted == 1
        assert "B" in report.record_errors
        assert store.processed_source_ids() == {"A"}

        # next cycle the address resolves and B is promoted
        doc["captured_at"] = "2021-01-01T00:30:00Z"
        report2 = run_poll_cycle(
            FakeSource([json.dumps(doc).encode()]), store, FakeGeocoder()
        )
        assert report2.promoted == 1
        assert store.processed_source_ids() == {"A", "B"}

    def test_geocoder_error_is_per_record(self):
        store = OutageStore()
        geocoder = FakeGeocoder(error_addresses={"1 Main St"})
        report = run_poll_cycle(FakeSource([snapshot_json(["A"])]), store, geocoder)
        assert report.promoted == 0
        assert "A" in report.record_errors

    def test_out_of_order_snapshot_rejected(self):
        store = OutageStore()
        run_poll_cycle(FakeSource([snapshot_json(["A"])]), store, FakeGeocoder())
        with pytest.raises(OutOfOrderSnapshot):
            run_poll_cycle(FakeSource([snapshot_json(["A"])]), store, FakeGeocoder())


class TestReplayDirectorySource:
    def test_lexicographic_order_and_exhaustion(self, tmp_path):
        (tmp_path / "b.json").write_bytes(snapshot_json(["B"], captured="2021-01-01T01:00:00Z"))
        (tmp_path / "a.json").write_bytes(snapshot_json(["A"]))
        source = ReplayDirectorySource(tmp_path)
        assert json.loads(source.fetch().raw)["reports"][0]["source_id"] == "A"
        assert json.loads(source.fetch().raw)["reports"][0]["source_id"] == "B"
        with pytest.raises(SourceExhausted):
            source.fetch()

    def test_csv_filename_supplies_captured_at(self, tmp_path):
        path = tmp_path / "2021-01-01T00_30_00Z.csv"
        path.write_text(
            "source_id,address,reported_at,cause,customers_affected\n"
            "a,1 Main St,2021-01-01T00:00:00Z,,\n"
        )
        fetched = ReplayDirectorySource(tmp_path).fetch()
        snap = parse_snapshot(fetched.raw, fetched.format, fetched.captured_at)
        assert snap.captured_at == datetime(2021, 1, 1, 0, 30, tzinfo=timezone.utc)
