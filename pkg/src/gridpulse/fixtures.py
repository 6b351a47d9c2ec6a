"""Synthetic data generator: builds a complete, self-consistent data
directory (zip table, features, demographics, offline geocoder, boundary
polygons, and a multi-day snapshot replay archive) for demos and tests."""

from __future__ import annotations

import csv
import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .timefmt import format_rfc3339

# rough per-borough lat/lon boxes, all inside the NYC extent
BOROUGH_BOXES = {
    "Manhattan": ((40.70, 40.87), (-74.02, -73.91)),
    "Bronx": ((40.80, 40.90), (-73.93, -73.79)),
    "Brooklyn": ((40.58, 40.73), (-74.03, -73.87)),
    "Queens": ((40.56, 40.79), (-73.95, -73.71)),
    "StatenIsland": ((40.50, 40.64), (-74.24, -74.06)),
}

BOROUGH_ZIP_PREFIX = {
    "Manhattan": "100",
    "Bronx": "104",
    "Brooklyn": "112",
    "Queens": "113",
    "StatenIsland": "103",
}

STREETS = [
    "Main St", "Ocean Ave", "Grand Concourse", "Victory Blvd", "Steinway St",
    "Flatbush Ave", "Broadway", "Jamaica Ave", "Fordham Rd", "Hylan Blvd",
]

CAUSES = [None, None, None, "weather", "weather", "equipment failure",
          "tree damage", "vehicle collision", "animal interference"]


def generate_fixture(
    out_dir: str | Path,
    days: int = 3,
    seed: int = 7,
    zips_per_borough: int = 5,
    snapshot_minutes: int = 30,
    start: datetime | None = None,
) -> Path:
    """Write the full fixture tree under out_dir and return its path."""
    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if start is None:
        start = datetime(2021, 6, 1, tzinfo=timezone.utc)

    zips = _make_zip_rows(rng, zips_per_borough)
    _write_csv(
        out / "zips.csv",
        ["zip", "borough", "centroid_lat", "centroid_lon", "population"],
        [
            [z["zip"], z["borough"], f"{z['lat']:.6f}", f"{z['lon']:.6f}", z["population"]]
            for z in zips
        ],
    )
    _write_features(out / "features.csv", rng, zips)
    _write_csv(
        out / "demographics.csv",
        ["zip", "median_income", "pct_nonwhite"],
        [
            [z["zip"], int(rng.uniform(30_000, 200_000)), f"{rng.uniform(0.1, 0.9):.3f}"]
            for z in zips
        ],
    )
    _write_boundaries(out / "boundaries.geojson", zips)

    incidents, addresses = _make_incidents(rng, zips, days, snapshot_minutes, start)
    _write_csv(out / "geocoder.csv", ["address", "zip"], sorted(addresses.items()))
    _write_snapshots(out / "snapshots", incidents, days, snapshot_minutes, start)
    return out


def _make_zip_rows(rng: np.random.Generator, per_borough: int) -> list[dict]:
    zips = []
    for borough, ((lat_lo, lat_hi), (lon_lo, lon_hi)) in BOROUGH_BOXES.items():
        prefix = BOROUGH_ZIP_PREFIX[borough]
        for i in range(per_borough):
            zips.append(
                {
                    "zip": f"{prefix}{i:02d}",
                    "borough": borough,
                    "lat": float(rng.uniform(lat_lo, lat_hi)),
                    "lon": float(rng.uniform(lon_lo, lon_hi)),
                    "population": int(rng.uniform(8_000, 90_000)),
                }
            )
    return zips


def _write_features(path: Path, rng: np.random.Generator, zips: list[dict]) -> None:
    header = [
        "zip", "pct_elderly", "cooling_centers", "affordable_buildings",
        "affordable_units", "pct_below_poverty", "children_under_five", "avg_caregivers",
    ]
    rows = []
    for z in zips:
        row = [
            z["zip"],
            f"{rng.uniform(0.05, 0.3):.3f}",
            str(int(rng.integers(0, 12))),
            str(int(rng.integers(0, 60))),
            str(int(rng.integers(0, 2500))),
            f"{rng.uniform(0.03, 0.4):.3f}",
            str(int(rng.integers(200, 6000))),
            f"{rng.uniform(0.2, 2.5):.2f}",
        ]
        # sprinkle missing cells to exercise imputation
        if rng.random() < 0.1:
            row[1 + int(rng.integers(0, 7))] = ""
        rows.append(row)
    _write_csv(path, header, rows)


def _write_boundaries(path: Path, zips: list[dict]) -> None:
    features = []
    for z in zips:
        d = 0.01
        lat, lon = z["lat"], z["lon"]
        ring = [
            [lon - d, lat - d], [lon + d, lat - d], [lon + d, lat + d],
            [lon - d, lat + d], [lon - d, lat - d],
        ]
        features.append(
            {
                "type": "Feature",
                "properties": {"zip": z["zip"]},
                "geometry": {"type": "Polygon", "coordinates": [ring]},
            }
        )
    path.write_text(
        json.dumps({"type": "FeatureCollection", "features": features}, indent=2),
        encoding="utf-8",
    )


def _make_incidents(
    rng: np.random.Generator,
    zips: list[dict],
    days: int,
    snapshot_minutes: int,
    start: datetime,
) -> tuple[list[dict], dict[str, str]]:
    """Incidents with start/end snapshot indices plus the address lookup."""
    n_snapshots = days * 24 * 60 // snapshot_minutes
    incidents = []
    addresses: dict[str, str] = {}
    counter = 0
    for snap_idx in range(n_snapshots):
        # diurnal outage pressure: more new outages in the afternoon
        hour = (snap_idx * snapshot_minutes // 60) % 24
        rate = 0.8 + 1.6 * np.exp(-((hour - 15) ** 2) / 18.0)
        for _ in range(rng.poisson(rate)):
            z = zips[int(rng.integers(0, len(zips)))]
            address = f"{int(rng.integers(1, 2000))} {STREETS[int(rng.integers(0, len(STREETS)))]}, {z['borough']}"
            addresses[address] = z["zip"]
            duration = int(rng.integers(1, 10))
            incidents.append(
                {
                    "source_id": f"o{counter:05d}",
                    "address": address,
                    "zip": z["zip"],
                    "start": snap_idx,
                    "end": min(snap_idx + duration, n_snapshots + 5),
                    "cause": CAUSES[int(rng.integers(0, len(CAUSES)))],
                    "customers": int(rng.integers(1, 400)),
                    "reported_at": start + timedelta(minutes=snapshot_minutes * snap_idx),
                }
            )
            counter += 1
    return incidents, addresses


def _write_snapshots(
    directory: Path,
    incidents: list[dict],
    days: int,
    snapshot_minutes: int,
    start: datetime,
) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    n_snapshots = days * 24 * 60 // snapshot_minutes
    for snap_idx in range(n_snapshots):
        captured = start + timedelta(minutes=snapshot_minutes * snap_idx)
        active = [
            i for i in incidents if i["start"] <= snap_idx < i["end"]
        ]
        doc = {
            "captured_at": format_rfc3339(captured),
            "reports": [
                {
                    "source_id": i["source_id"],
                    "address": i["address"],
                    "reported_at": format_rfc3339(i["reported_at"]),
                    "cause": i["cause"],
                    "customers_affected": i["customers"],
                }
                for i in active
            ],
        }
        name = f"snapshot_{snap_idx:05d}.json"
        (directory / name).write_text(json.dumps(doc, indent=2), encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def main(argv: list[str] | None = None) -> None:
    import argparse

    parser = argparse.ArgumentParser(description="generate a synthetic data directory")
    parser.add_argument("out_dir")
    parser.add_argument("--days", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    path = generate_fixture(args.out_dir, days=args.days, seed=args.seed)
    print(f"fixture written to {path}")


if __name__ == "__main__":
    main()
