from __future__ import annotations

import csv
import json
from pathlib import Path

from click.testing import CliRunner
from jsonschema import validate

from gridpulse import schemas
from gridpulse.cli import main

from test_ingest import snapshot_json

RUNNER = CliRunner()


def write_inputs(data_dir: Path, zips=("10001", "10002")):
    data_dir.mkdir(parents=True, exist_ok=True)
    boroughs = ["Manhattan", "Queens", "Brooklyn", "Bronx", "StatenIsland"]
    with open(data_dir / "zips.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["zip", "borough", "centroid_lat", "centroid_lon", "population"])
        for i, z in enumerate(zips):
            writer.writerow([z, boroughs[i % 5], 40.5 + i * 0.02, -74.0 + i * 0.02, 10_000])
    with open(data_dir / "geocoder.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["address", "zip"])
        writer.writerow(["1 Main St", zips[0]])
    with open(data_dir / "features.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["zip", "pct_elderly", "cooling_centers", "affordable_buildings",
             "affordable_units", "pct_below_poverty", "children_under_five", "avg_caregivers"]
        )
        for i, z in enumerate(zips):
            writer.writerow([z, 0.1 + 0.01 * i, i, 2 * i, 30 * i, 0.2, 100 + i, 1.0])


def write_snapshots(directory: Path, spread: bool = False):
    """S1 {A,B}, S2 {B,C}, S3 {C}: hand-traced lifecycle below.

    With spread=True the captures are hours apart so the history spans
    multiple 2-hour steps (needed by fit/analyze).
    """
    directory.mkdir(parents=True, exist_ok=True)
    times = (
        ["2021-01-01T00:00:00Z", "2021-01-01T02:30:00Z", "2021-01-01T05:00:00Z"]
        if spread
        else ["2021-01-01T00:00:00Z", "2021-01-01T00:30:00Z", "2021-01-01T01:00:00Z"]
    )
    for name, ids, captured in [("s1", ["A", "B"], times[0]), ("s2", ["B", "C"], times[1]),
                                ("s3", ["C"], times[2])]:
        (directory / f"{name}.json").write_bytes(
            snapshot_json(ids, captured=captured, reported=captured)
        )


def run(args):
    return RUNNER.invoke(main, args, catch_exceptions=False)


class TestIngestReplayAndExport:
    def test_lifecycle_matches_hand_trace(self, tmp_path):
        data_dir = tmp_path / "data"
        write_inputs(data_dir)
        write_snapshots(tmp_path / "snaps")

        result = run(["ingest-replay", str(tmp_path / "snaps"), "--data-dir", str(data_dir)])
        assert result.exit_code == 0, result.output

        result = run(["export", "--data-dir", str(data_dir), "--out", str(tmp_path / "out")])
        assert result.exit_code == 0, result.output

        with open(tmp_path / "out" / "historical.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        # hand trace: A appears in S1, absent from S2 -> retired at 00:30;
        # B appears in S1, absent from S3 -> retired at 01:00
        assert [(r["source_id"], r["ended_at"]) for r in rows] == [
            ("A", "2021-01-01T00:30:00Z"),
            ("B", "2021-01-01T01:00:00Z"),
        ]
        with open(tmp_path / "out" / "processed.csv", newline="") as fh:
            processed = list(csv.DictReader(fh))
        assert [r["source_id"] for r in processed] == ["C"]


class TestArtifactCommands:
    def setup_data(self, tmp_path):
        data_dir = tmp_path / "data"
        write_inputs(data_dir)
        write_snapshots(tmp_path / "snaps", spread=True)
        run(["ingest-replay", str(tmp_path / "snaps"), "--data-dir", str(data_dir)])
        return data_dir

    def test_index_writes_valid_rankings(self, tmp_path):
        data_dir = self.setup_data(tmp_path)
        result = run(["index", str(data_dir / "features.csv"), "--data-dir", str(data_dir)])
        assert result.exit_code == 0, result.output
        payload = json.loads((data_dir / "rankings.json").read_text())
        validate(payload, schemas.RANKINGS_SCHEMA)
        assert payload["count"] == 2

    def test_cluster_writes_valid_assignment(self, tmp_path):
        data_dir = self.setup_data(tmp_path)
        result = run(["cluster", "--data-dir", str(data_dir), "--clusters", "2", "--seed", "3"])
        assert result.exit_code == 0, result.output
        payload = json.loads((data_dir / "clusters.json").read_text())
        validate(payload, schemas.CLUSTERS_SCHEMA)
        assert payload["k"] == 2

    def test_fit_is_deterministic_per_seed(self, tmp_path):
        data_dir = self.setup_data(tmp_path)
        run(["cluster", "--data-dir", str(data_dir), "--clusters", "2", "--seed", "3"])
        args = ["fit", "--data-dir", str(data_dir), "--samples", "200", "--seed", "7"]
        assert run(args).exit_code == 0
        first = (data_dir / "transition.json").read_bytes()
        assert run(args).exit_code == 0
        assert (data_dir / "transition.json").read_bytes() == first
        validate(json.loads(first), schemas.TRANSITION_SCHEMA)

    def test_predict_without_model_fails_cleanly(self, tmp_path):
        data_dir = self.setup_data(tmp_path)
        result = RUNNER.invoke(main, ["predict", "--data-dir", str(data_dir)])
        assert result.exit_code == 1
        assert "fit" in result.output

    def test_predict_writes_valid_payload_and_figure(self, tmp_path):
        data_dir = self.setup_data(tmp_path)
        run(["cluster", "--data-dir", str(data_dir), "--clusters", "2", "--seed", "3"])
        run(["fit", "--data-dir", str(data_dir), "--samples", "100", "--seed", "7"])
        result = run(["predict", "--data-dir", str(data_dir)])
        assert result.exit_code == 0, result.output
        payload = json.loads((data_dir / "prediction.json").read_text())
        validate(payload, schemas.PREDICTION_SCHEMA)
        assert (data_dir / "influence_graph.png").exists()

    def test_analyze_writes_reports_and_figures(self, tmp_path):
        data_dir = self.setup_data(tmp_path)
        out = tmp_path / "reports"
        result = run(["analyze", "--data-dir", str(data_dir), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "per_capita.csv").exists()
        assert (out / "per_capita.png").exists()
        assert (out / "causes.csv").exists()
        assert (out / "transition_bins.csv").exists()
        assert (out / "transition_bins.png").exists()
        text = (out / "per_capita.csv").read_text().splitlines()
        assert text[0] == "borough,count,per_capita"
        assert (out / "transition_bins.csv").read_text().splitlines()[0] == "1,2,4,8,16,32,inf"


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self):
        result = RUNNER.invoke(main, ["export", "--bogus"])
        assert result.exit_code != 0

    def test_missing_inputs_is_io_error(self, tmp_path):
        result = RUNNER.invoke(
            main, ["ingest-replay", str(tmp_path), "--data-dir", str(tmp_path / "nope")]
        )
        assert result.exit_code == 2

    def test_validation_error_is_exit_1(self, tmp_path):
        data_dir = tmp_path / "data"
        write_inputs(data_dir)
        # corrupt features: fraction out of range
        features = data_dir / "features.csv"
        features.write_text(
            features.read_text().replace("0.1,0,0,0,0.2,100,1.0", "1.7,0,0,0,0.2,100,1.0")
        )
        result = RUNNER.invoke(main, ["index", str(features), "--data-dir", str(data_dir)])
        assert result.exit_code == 1
