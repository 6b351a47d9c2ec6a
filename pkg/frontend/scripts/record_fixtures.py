"""Record API fixtures for the dashboard's contract tests.

Builds a service over a synthetic 210-zip table (so every marker color
band is populated), drives outages through the store, fits a real
transition matrix, and saves the exact HTTP payloads under
frontend/tests/fixtures/. Rerun after changing the API:

    python frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from gridpulse.config import ApiConfig
from gridpulse.geo import Borough, ZipInfo
from gridpulse.influence import build_outage_vectors, fit_transition_matrix, kmeans_cluster
from gridpulse.artifacts import build_series
from gridpulse.ingest import OutageReport, PromotedOutage, Snapshot, reconcile
from gridpulse.service import ServiceRuntime, create_app
from gridpulse.store import OutageStore, all_history
from gridpulse.vulnerability import FEATURES, ZipFeatureRow

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
N_ZIPS = 210
T0 = datetime(2021, 6, 1, tzinfo=timezone.utc)
BOROUGHS = [Borough.MANHATTAN, Borough.BRONX, Borough.BROOKLYN,
            Borough.QUEENS, Borough.STATEN_ISLAND]


def build_runtime() -> ServiceRuntime:
    zip_table = {}
    feature_rows = []
    demographics = {}
    for i in range(N_ZIPS):
        zip_code = f"{10000 + i}"
        zip_table[zip_code] = ZipInfo(
            zip=zip_code,
            borough=BOROUGHS[i % 5],
            centroid_lat=40.45 + 0.5 * ((i * 37) % 211) / 211,
            centroid_lon=-74.25 + 0.6 * ((i * 53) % 199) / 199,
            population=8_000 + 137 * i,
        )
        values = dict.fromkeys(FEATURES, 0.0)
        values["cooling_centers"] = float(N_ZIPS - i)  # zcr of 10000+i is i+1
        feature_rows.append(ZipFeatureRow(zip=zip_code, **values))
        demographics[zip_code] = {
            "median_income": 35_000.0 + 900.0 * i,
            "pct_nonwhite": 0.15 + (i % 60) / 100.0,
        }
    store = OutageStore()
    runtime = ServiceRuntime(
        config=ApiConfig(seed=3, clusters=11, samples=1000),
        store=store,
        zip_table=zip_table,
        feature_rows=feature_rows,
        demographics=demographics,
    )
    _populate_store(store, zip_table)
    _fit_model(runtime)
    runtime.refresh()
    return runtime


def _populate_store(store: OutageStore, zip_table: dict) -> None:
    rng = np.random.default_rng(11)
    zips = sorted(zip_table)
    # one outage in each color band stays active through the last snapshot:
    # zcr 10 red, 60 orange, 110 yellow, 160 green, 205 blue
    persistent = {f"band{z}": f"{10000 + z - 1}" for z in (10, 60, 110, 160, 205)}
    causes = [None, "weather", "equipment failure", "tree damage"]
    active: dict[str, str] = {}
    for cycle in range(16):
        captured = T0 + timedelta(minutes=30 * cycle)
        for sid in list(active):
            if rng.random() < 0.4:
                del active[sid]
        for j in range(int(rng.integers(0, 4))):
            sid = f"o{cycle:02d}{j}"
            active[sid] = zips[int(rng.integers(0, len(zips)))]
        current = dict(active)
        current.update(persistent)
        reports = tuple(
            OutageReport(
                source_id=sid,
                address=f"{sid} Example Ave",
                reported_at=captured,
                cause=causes[int(rng.integers(0, len(causes)))],
            )
            for sid in sorted(current)
        )
        snapshot = Snapshot(captured_at=captured, reports=reports)
        plan = reconcile(snapshot, store.processed_source_ids())
        promotions = [
            PromotedOutage(
                source_id=sid,
                address=f"{sid} Example Ave",
                zip=current[sid],
                borough=zip_table[current[sid]].borough.value,
                cause=snapshot.report(sid).cause,
                reported_at=captured,
            )
            for sid in sorted(plan.to_promote_processed)
        ]
        store.apply_plan(plan, promotions)


def _fit_model(runtime: ServiceRuntime) -> None:
    centroids = {
        z: (info.centroid_lat, info.centroid_lon) for z, info in runtime.zip_table.items()
    }
    clusters = kmeans_cluster(centroids, k=11, seed=3)
    series = build_series(all_history(runtime.store), step_hours=2)
    vectors = build_outage_vectors(series, clusters)
    runtime.clusters = clusters
    runtime.transition = fit_transition_matrix(vectors, s=1000, seed=3)


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    runtime = build_runtime()
    client = TestClient(create_app(runtime))
    recordings = {
        "current.json": "/api/outages/current",
        "historical.json": "/api/outages/historical?page_size=500",
        "predictions.json": "/api/predictions/next",
        "demographics.json": "/api/demographics",
        "per_capita.json": "/api/analytics/per-capita",
        "causes.json": "/api/analytics/causes",
        "transition_bins.json": "/api/analytics/transition-bins",
        "config.json": "/api/config",
    }
    for name, path in recordings.items():
        resp = client.get(path)
        resp.raise_for_status()
        (OUT_DIR / name).write_text(json.dumps(resp.json(), indent=2, sort_keys=True) + "\n")
        print(f"recorded {name} <- {path}")
    for table in ("processed", "historical"):
        resp = client.get(f"/api/downloads/{table}.csv")
        resp.raise_for_status()
        (OUT_DIR / f"download_{table}.csv").write_bytes(resp.content)
        print(f"recorded download_{table}.csv")
    colors = {o["color"] for o in json.loads((OUT_DIR / "current.json").read_text())["outages"]}
    print(f"color bands present: {sorted(colors)}")
    assert colors == {"red", "orange", "yellow", "green", "blue"}, "missing color bands"


if __name__ == "__main__":
    main()
