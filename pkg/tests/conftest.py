from __future__ import annotations

import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gridpulse.geo import Borough, ZipInfo
from gridpulse.ingest import OutageReport, Snapshot

T0 = datetime(2021, 1, 1, 0, 0, 0, tzinfo=timezone.utc)


def ts(minutes: float = 0) -> datetime:
    return T0 + timedelta(minutes=minutes)


def make_snapshot(ids, minutes=0, address=None, reported_minutes=None):
    """Snapshot with one report per id; reported_at defaults to capture time."""
    captured = ts(minutes)
    reports = tuple(
        OutageReport(
            source_id=i,
            address=address or f"{n + 1} Main St",
            reported_at=ts(reported_minutes) if reported_minutes is not None else captured,
        )
        for n, i in enumerate(ids)
    )
    return Snapshot(captured_at=captured, reports=reports)


def make_zip_info(zip_code="10001", borough=Borough.MANHATTAN, lat=40.75, lon=-73.99, pop=1000):
    return ZipInfo(zip=zip_code, borough=borough, centroid_lat=lat, centroid_lon=lon, population=pop)


@pytest.fixture
def zip_table():
    return {
        "10001": make_zip_info("10001", Borough.MANHATTAN, 40.75, -73.99, 50_000),
        "10002": make_zip_info("10002", Borough.MANHATTAN, 40.72, -73.98, 60_000),
        "10451": make_zip_info("10451", Borough.BRONX, 40.82, -73.92, 40_000),
        "11201": make_zip_info("11201", Borough.BROOKLYN, 40.69, -73.99, 70_000),
        "11354": make_zip_info("11354", Borough.QUEENS, 40.77, -73.83, 100),
        "10301": make_zip_info("10301", Borough.STATEN_ISLAND, 40.63, -74.09, 30_000),
    }
