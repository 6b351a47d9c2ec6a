"""Snapshot ingestion: pull outage snapshots from a source adapter, parse
and validate them, and reconcile each one against the processed table to
drive the crawled -> processed -> historical lifecycle."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Optional, Protocol, TYPE_CHECKING

import httpx

from .errors import (
    GeocoderError,
    OutOfOrderSnapshot,
    SnapshotParseError,
    SnapshotValidationError,
    SourceError,
    SourceExhausted,
)
from .timefmt import format_rfc3339, parse_rfc3339

if TYPE_CHECKING:
    from .geo import GeocoderContract
    from .store import OutageStore

logger = logging.getLogger(__name__)

DEFAULT_POLL_INTERVAL_MINUTES = 30

CSV_SNAPSHOT_HEADER = ["source_id", "address", "reported_at", "cause", "customers_affected"]


@dataclass(frozen=True)
class OutageReport:
    source_id: str
    address: str
    reported_at: datetime
    cause: Optional[str] = None
    customers_affected: Optional[int] = None


@dataclass(frozen=True)
class Snapshot:
    captured_at: datetime
    reports: tuple[OutageReport, ...]

    def __post_init__(self) -> None:
        seen = set()
        for report in self.reports:
            if report.source_id in seen:
                raise SnapshotValidationError(
                    f"duplicate source_id {report.source_id!r} within snapshot"
                )
            seen.add(report.source_id)

    def source_ids(self) -> frozenset[str]:
        return frozenset(r.source_id for r in self.reports)

    def report(self, source_id: str) -> OutageReport:
        for r in self.reports:
            if r.source_id == source_id:
                return r
        raise KeyError(source_id)


@dataclass(frozen=True)
class ReconcilePlan:
    captured_at: datetime
    to_insert_crawled: frozenset[str]
    to_promote_processed: frozenset[str]
    to_retire_historical: frozenset[str]
    basis_processed_ids: frozenset[str]


@dataclass
class CycleReport:
    inserted: int = 0
    promoted: int = 0
    retired: int = 0
    source_errors: list[str] = field(default_factory=list)
    record_errors: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.source_errors


def _validate_report(report_index: int, report: OutageReport, captured_at: datetime) -> None:
    if not report.source_id:
        raise SnapshotValidationError(f"record {report_index}: empty source_id")
    if report.reported_at > captured_at:
        raise SnapshotValidationError(
            f"record {report_index} ({report.source_id}): reported_at "
            f"{format_rfc3339(report.reported_at)} is after snapshot capture time"
        )
    if report.customers_affected is not None and report.customers_affected < 0:
        raise SnapshotValidationError(
            f"record {report_index} ({report.source_id}): negative customers_affected"
        )


def parse_snapshot(
    raw: bytes, format: str = "json", captured_at: Optional[datetime] = None
) -> Snapshot:
    """Parse snapshot bytes in the documented JSON or CSV schema.

    JSON carries its own captured_at; the CSV variant has no header slot
    for it, so the caller must supply one. Unknown fields are ignored.
    """
    if format == "json":
        return _parse_json_snapshot(raw)
    if format == "csv":
        if captured_at is None:
            raise SnapshotParseError("CSV snapshots require an explicit captured_at")
        return _parse_csv_snapshot(raw, captured_at)
    raise ValueError(f"unknown snapshot format {format!r}")


def _parse_json_snapshot(raw: bytes) -> Snapshot:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SnapshotParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "captured_at" not in doc:
        raise SnapshotParseError("snapshot JSON must be an object with captured_at")
    try:
        captured_at = parse_rfc3339(doc["captured_at"])
    except ValueError as exc:
        raise SnapshotParseError(f"captured_at: {exc}") from exc
    reports = []
    for i, entry in enumerate(doc.get("reports", [])):
        try:
            report = OutageReport(
                source_id=str(entry["source_id"]),
                address=str(entry["address"]),
                reported_at=parse_rfc3339(entry["reported_at"]),
                cause=entry.get("cause"),
                customers_affected=(
                    int(entry["customers_affected"])
                    if entry.get("customers_affected") is not None
                    else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SnapshotParseError(f"record {i}: {exc}") from exc
        _validate_report(i, report, captured_at)
        reports.append(report)
    return Snapshot(captured_at=captured_at, reports=tuple(reports))


def _parse_csv_snapshot(raw: bytes, captured_at: datetime) -> Snapshot:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SnapshotParseError(f"CSV snapshot is not UTF-8: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != CSV_SNAPSHOT_HEADER:
        raise SnapshotParseError(
            f"CSV header must be {','.join(CSV_SNAPSHOT_HEADER)}, got {reader.fieldnames}"
        )
    reports = []
    for i, row in enumerate(reader):
        try:
            report = OutageReport(
                source_id=row["source_id"],
                address=row["address"],
                reported_at=parse_rfc3339(row["reported_at"]),
                cause=row["cause"] or None,
                customers_affected=int(row["customers_affected"]) if row["customers_affected"] else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SnapshotParseError(f"record {i}: {exc}") from exc
        _validate_report(i, report, captured_at)
        reports.append(report)
    return Snapshot(captured_at=captured_at, reports=tuple(reports))


def reconcile(snapshot: Snapshot, processed_ids: frozenset[str]) -> ReconcilePlan:
    """Pure set computation of lifecycle transitions for one snapshot.

    Everything in the snapshot lands in the transient crawled set; ids not
    yet processed are promoted; processed ids absent from the snapshot are
    retired to historical with end time = snapshot.captured_at.
    """
    snapshot_ids = snapshot.source_ids()
    return ReconcilePlan(
        captured_at=snapshot.captured_at,
        to_insert_crawled=snapshot_ids,
        to_promote_processed=snapshot_ids - processed_ids,
        to_retire_historical=frozenset(processed_ids) - snapshot_ids,
        basis_processed_ids=frozenset(processed_ids),
    )


class SourceAdapter(Protocol):
    """fetch() returns one snapshot's raw bytes plus parsing hints."""

    def fetch(self) -> "FetchedSnapshot": ...


@dataclass(frozen=True)
class FetchedSnapshot:
    raw: bytes
    format: str = "json"
    captured_at: Optional[datetime] = None


class HttpSource:
    """Polls a JSON snapshot endpoint with plain GET."""

    def __init__(self, url: str, timeout: float = 30.0):
        self._url = url
        self._timeout = timeout

    def fetch(self) -> FetchedSnapshot:
        try:
            resp = httpx.get(self._url, timeout=self._timeout)
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise SourceError(f"snapshot fetch failed: {exc}") from exc
        return FetchedSnapshot(raw=resp.content, format="json")


class ReplayDirectorySource:
    """Replays snapshot files from a directory in lexicographic order.

    JSON files carry captured_at themselves; for CSV files it is derived
    from the filename stem (RFC3339 with ':' optionally replaced by '-').
    """

    def __init__(self, directory: str | Path):
        self._files = sorted(
            p for p in Path(directory).iterdir() if p.suffix.lower() in (".json", ".csv")
        )
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._files)

    @property
    def exhausted(self) -> bool:
        return self._cursor >= len(self._files)

    def fetch(self) -> FetchedSnapshot:
        if self.exhausted:
            raise SourceExhausted("replay directory has no further snapshots")
        path = self._files[self._cursor]
        self._cursor += 1
        raw = path.read_bytes()
        if path.suffix.lower() == ".json":
            return FetchedSnapshot(raw=raw, format="json")
        return FetchedSnapshot(raw=raw, format="csv", captured_at=_captured_at_from_name(path))


def _captured_at_from_name(path: Path) -> datetime:
    stem = path.stem
    for candidate in (stem, stem.replace("_", ":")):
        try:
            return parse_rfc3339(candidate)
        except ValueError:
            continue
    raise SnapshotParseError(
        f"cannot derive captured_at from CSV snapshot filename {path.name!r}"
    )


def run_poll_cycle(
    source: SourceAdapter,
    store: "OutageStore",
    geocoder: "GeocoderContract",
    now: Optional[datetime] = None,
) -> CycleReport:
    """Fetch, parse, reconcile and apply one snapshot.

    The cycle is atomic per outage: a failed enrichment keeps that outage
    out of the processed table (it stays in the transient crawled set and
    is retried next cycle) while the rest of the plan proceeds. A source
    failure skips the whole cycle, leaving the store untouched.
    """
    report = CycleReport()
    try:
        fetched = source.fetch()
        snapshot = parse_snapshot(fetched.raw, fetched.format, fetched.captured_at)
    except SourceExhausted:
        raise
    except (SourceError, SnapshotParseError, SnapshotValidationError) as exc:
        report.source_errors.append(str(exc))
        logger.warning("poll cycle skipped: %s", exc)
        return report

    last = store.last_captured_at()
    if last is not None and snapshot.captured_at <= last:
        raise OutOfOrderSnapshot(
            f"snapshot captured_at {format_rfc3339(snapshot.captured_at)} is not after "
            f"last applied snapshot {format_rfc3339(last)}"
        )

    plan = reconcile(snapshot, store.processed_source_ids())
    report.inserted = len(plan.to_insert_crawled)

    promotions = []
    failed_ids = set()
    for source_id in sorted(plan.to_promote_processed):
        outage = snapshot.report(source_id)
        try:
            info = geocoder.resolve(outage.address)
        except (GeocoderError, ValueError) as exc:
            report.record_errors[source_id] = str(exc)
            failed_ids.add(source_id)
            continue
        if info is None:
            report.record_errors[source_id] = f"address not found: {outage.address!r}"
            failed_ids.add(source_id)
            continue
        promotions.append(
            PromotedOutage(
                source_id=source_id,
                address=outage.address,
                zip=info.zip,
                borough=info.borough.value,
                cause=outage.cause,
                reported_at=outage.reported_at,
            )
        )

    effective = ReconcilePlan(
        captured_at=plan.captured_at,
        to_insert_crawled=plan.to_insert_crawled,
        to_promote_processed=plan.to_promote_processed - frozenset(failed_ids),
        to_retire_historical=plan.to_retire_historical,
        basis_processed_ids=plan.basis_processed_ids,
    )
    metadata_updates = [
        snapshot.report(source_id)
        for source_id in sorted(snapshot.source_ids() & plan.basis_processed_ids)
    ]
    counts = store.apply_plan(effective, promotions, metadata_updates)
    report.promoted = counts.promoted
    report.retired = counts.retired
    return report


@dataclass(frozen=True)
class PromotedOutage:
    """Enriched outage ready for insertion into the processed table."""

    source_id: str
    address: str
    zip: str
    borough: str
    cause: Optional[str]
    reported_at: datetime
