"""Single-file outage store: processed and historical lifecycle tables
with atomic plan application, filtered queries, and RFC4180 CSV export.

The transient "currently crawled" set is not persisted; it is always the
latest snapshot's id set and is materialized per cycle by the ingest
module. Many readers / one writer: a process-wide lock serializes writes
and each read runs a single consistent SELECT.
"""

from __future__ import annotations

import csv
import io
import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional, Sequence

from .errors import StoreConflictError
from .ingest import OutageReport, PromotedOutage, ReconcilePlan
from .timefmt import format_rfc3339, parse_rfc3339

EXPORT_HEADER = [
    "internal_id",
    "source_id",
    "address",
    "zip",
    "borough",
    "cause",
    "reported_at",
    "first_seen_at",
    "ended_at",
    "stage",
]

STAGES = ("processed", "historical")

_SCHEMA = """
CREATE TABLE IF NOT EXISTS outages (
    internal_id INTEGER PRIMARY KEY AUTOINCREMENT,
    source_id TEXT NOT NULL,
    address TEXT NOT NULL,
    zip TEXT NOT NULL,
    borough TEXT NOT NULL,
    cause TEXT,
    reported_at TEXT NOT NULL,
    first_seen_at TEXT NOT NULL,
    ended_at TEXT,
    stage TEXT NOT NULL CHECK (stage IN ('processed', 'historical')),
    CHECK ((stage = 'historical') = (ended_at IS NOT NULL))
);
CREATE INDEX IF NOT EXISTS idx_outages_stage ON outages (stage, reported_at, internal_id);
CREATE UNIQUE INDEX IF NOT EXISTS idx_processed_source
    ON outages (source_id) WHERE stage = 'processed';
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
"""


@dataclass(frozen=True)
class StoredOutage:
    internal_id: int
    source_id: str
    address: str
    zip: str
    borough: str
    cause: Optional[str]
    reported_at: datetime
    first_seen_at: datetime
    ended_at: Optional[datetime]
    stage: str

    def __post_init__(self) -> None:
        if (self.stage == "historical") != (self.ended_at is not None):
            raise ValueError("ended_at must be present iff stage is historical")
        if self.ended_at is not None and self.ended_at < self.first_seen_at:
            raise ValueError("ended_at precedes first_seen_at")


@dataclass(frozen=True)
class AppliedCounts:
    promoted: int
    retired: int
    updated: int


class OutageStore:
    def __init__(self, path: str | Path = ":memory:"):
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.execute("PRAGMA foreign_keys = ON")
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)

    def close(self) -> None:
        self._conn.close()

    # -- reads ---------------------------------------------------------

    def last_captured_at(self) -> Optional[datetime]:
        with self._lock:
            row = self._conn.execute(
                "SELECT value FROM meta WHERE key = 'last_captured_at'"
            ).fetchone()
        return parse_rfc3339(row[0]) if row else None

    def processed_source_ids(self) -> frozenset[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT source_id FROM outages WHERE stage = 'processed'"
            ).fetchall()
        return frozenset(r[0] for r in rows)

    def count(self, stage: str) -> int:
        self._check_stage(stage)
        with self._lock:
            (n,) = self._conn.execute(
                "SELECT COUNT(*) FROM outages WHERE stage = ?", (stage,)
            ).fetchone()
        return int(n)

    def query(
        self,
        stage: str,
        reported_from: Optional[datetime] = None,
        reported_to: Optional[datetime] = None,
        zip_code: Optional[str] = None,
        borough: Optional[str] = None,
        page: int = 1,
        page_size: Optional[int] = None,
    ) -> list[StoredOutage]:
        """Filtered rows in deterministic (reported_at, internal_id) order."""
        self._check_stage(stage)
        if reported_from is not None and reported_to is not None and reported_from > reported_to:
            raise ValueError("reported_from is after reported_to")
        if page < 1:
            raise ValueError("page numbers start at 1")
        clauses = ["stage = ?"]
        params: list = [stage]
        if reported_from is not None:
            clauses.append("reported_at >= ?")
            params.append(format_rfc3339(reported_from))
        if reported_to is not None:
            clauses.append("reported_at <= ?")
            params.append(format_rfc3339(reported_to))
        if zip_code is not None:
            clauses.append("zip = ?")
            params.append(zip_code)
        if borough is not None:
            clauses.append("borough = ?")
            params.append(borough)
        sql = (
            "SELECT internal_id, source_id, address, zip, borough, cause, reported_at,"
            " first_seen_at, ended_at, stage FROM outages WHERE "
            + " AND ".join(clauses)
            + " ORDER BY reported_at, internal_id"
        )
        if page_size is not None:
            sql += " LIMIT ? OFFSET ?"
            params.extend([page_size, (page - 1) * page_size])
        with self._lock:
            rows = self._conn.execute(sql, params).fetchall()
        return [self._to_outage(row) for row in rows]

    # -- writes --------------------------------------------------------

    def apply_plan(
        self,
        plan: ReconcilePlan,
        promotions: Sequence[PromotedOutage],
        metadata_updates: Sequence[OutageReport] = (),
    ) -> AppliedCounts:
        """Apply one reconcile cycle atomically.

        The plan must have been computed against the store's current
        processed set; a stale plan raises StoreConflictError and the
        caller re-reconciles. Readers observe either the pre- or
        post-state, never a mix.
        """
        promoted_ids = {p.source_id for p in promotions}
        if not promoted_ids <= plan.to_promote_processed:
            raise ValueError("promotions contain ids outside the plan's promote set")
        captured = format_rfc3339(plan.captured_at)
        with self._lock:
            current = self.processed_source_ids()
            if current != plan.basis_processed_ids:
                raise StoreConflictError(
                    "processed set changed since the plan was computed; re-reconcile"
                )
            with self._conn:
                for outage in promotions:
                    self._conn.execute(
                        "INSERT INTO outages (source_id, address, zip, borough, cause,"
                        " reported_at, first_seen_at, ended_at, stage)"
                        " VALUES (?, ?, ?, ?, ?, ?, ?, NULL, 'processed')",
                        (
                            outage.source_id,
                            outage.address,
                            outage.zip,
                            outage.borough,
                            outage.cause,
                            format_rfc3339(outage.reported_at),
                            captured,
                        ),
                    )
                retired = 0
                for source_id in sorted(plan.to_retire_historical):
                    cur = self._conn.execute(
                        "UPDATE outages SET stage = 'historical', ended_at = ?"
                        " WHERE source_id = ? AND stage = 'processed'",
                        (captured, source_id),
                    )
                    retired += cur.rowcount
                updated = 0
                for report in metadata_updates:
                    cur = self._conn.execute(
                        "UPDATE outages SET address = ?, cause = ?"
                        " WHERE source_id = ? AND stage = 'processed'"
                        " AND (address != ? OR COALESCE(cause, '') != COALESCE(?, ''))",
                        (report.address, report.cause, report.source_id, report.address, report.cause),
                    )
                    updated += cur.rowcount
                self._conn.execute(
                    "INSERT INTO meta (key, value) VALUES ('last_captured_at', ?)"
                    " ON CONFLICT(key) DO UPDATE SET value = excluded.value",
                    (captured,),
                )
        return AppliedCounts(promoted=len(promotions), retired=retired, updated=updated)

    # -- CSV export / import -------------------------------------------

    def export_csv(self, stage: str) -> bytes:
        """RFC4180 export of one lifecycle table, in query order."""
        self._check_stage(stage)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(EXPORT_HEADER)
        for row in self.query(stage):
            writer.writerow(
                [
                    row.internal_id,
                    row.source_id,
                    row.address,
                    row.zip,
                    row.borough,
                    row.cause if row.cause is not None else "",
                    format_rfc3339(row.reported_at),
                    format_rfc3339(row.first_seen_at),
                    format_rfc3339(row.ended_at) if row.ended_at else "",
                    row.stage,
                ]
            )
        return buf.getvalue().encode("utf-8")

    def import_csv(self, data: bytes) -> int:
        """Load rows previously produced by export_csv (round-trip safe)."""
        reader = csv.reader(io.StringIO(data.decode("utf-8")))
        header = next(reader, None)
        if header != EXPORT_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        inserted = 0
        with self._lock, self._conn:
            for row in reader:
                (internal_id, source_id, address, zip_code, borough, cause,
                 reported_at, first_seen_at, ended_at, stage) = row
                self._check_stage(stage)
                self._conn.execute(
                    "INSERT INTO outages (internal_id, source_id, address, zip, borough,"
                    " cause, reported_at, first_seen_at, ended_at, stage)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        int(internal_id),
                        source_id,
                        address,
                        zip_code,
                        borough,
                        cause if cause != "" else None,
                        reported_at,
                        first_seen_at,
                        ended_at if ended_at != "" else None,
                        stage,
                    ),
                )
                inserted += 1
        return inserted

    # -- helpers --------------------------------------------------------

    @staticmethod
    def _check_stage(stage: str) -> None:
        if stage not in STAGES:
            raise ValueError(f"unknown lifecycle table {stage!r}")

    @staticmethod
    def _to_outage(row: tuple) -> StoredOutage:
        return StoredOutage(
            internal_id=row[0],
            source_id=row[1],
            address=row[2],
            zip=row[3],
            borough=row[4],
            cause=row[5],
            reported_at=parse_rfc3339(row[6]),
            first_seen_at=parse_rfc3339(row[7]),
            ended_at=parse_rfc3339(row[8]) if row[8] else None,
            stage=row[9],
        )


def all_history(store: OutageStore) -> list[StoredOutage]:
    """Processed plus historical rows, the population for analytics."""
    return store.query("processed") + store.query("historical")
