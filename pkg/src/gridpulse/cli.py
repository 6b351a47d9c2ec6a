"""Command-line pipeline: replay archives, compute the vulnerability
index, run analytics reports (figures + delimited files), fit and apply
the transition model, export CSVs, and serve the HTTP API."""

from __future__ import annotations

import csv
import functools
import logging
import sys
import time
from pathlib import Path

import click

from . import analytics, geo, influence, report
from .artifacts import (
    build_series,
    latest_complete_vector,
    load_clusters,
    load_transition,
    prediction_payload,
    rankings_payload,
    save_json,
    zip_outage_counts,
)
from .config import ApiConfig, apply_overrides, load_config
from .errors import GridPulseError, SourceExhausted
from .ingest import ReplayDirectorySource, run_poll_cycle
from .store import OutageStore, all_history
from .vulnerability import build_rankings, load_feature_table

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 1
EXIT_IO = 2


def handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (GridPulseError, ValueError, KeyError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


def common_options(func):
    for option in reversed(
        [
            click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                         help="TOML config file"),
            click.option("--seed", type=int, default=None, help="RNG seed override"),
            click.option("--step-hours", type=int, default=None),
            click.option("--clusters", "clusters_", type=int, default=None),
            click.option("--samples", type=int, default=None),
            click.option("--data-dir", type=click.Path(), default=None),
        ]
    ):
        func = option(func)
    return func


def build_config(config_path, seed, step_hours, clusters_, samples, data_dir) -> ApiConfig:
    config = load_config(config_path)
    return apply_overrides(
        config,
        seed=seed,
        step_hours=step_hours,
        clusters=clusters_,
        samples=samples,
        data_dir=data_dir,
    )


@click.group()
def main() -> None:
    """Outage pipeline tools."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command("ingest-replay")
@click.argument("snapshot_dir", type=click.Path(exists=True, file_okay=False))
@common_options
@handle_errors
def ingest_replay(snapshot_dir, **cfg):
    """Replay a directory of snapshot files into the store."""
    config = build_config(**cfg)
    config.data_dir.mkdir(parents=True, exist_ok=True)
    zip_table = geo.load_zip_table(config.zip_table_path)
    geocoder = geo.OfflineGeocoder.from_csv(config.geocoder_path, zip_table)
    store = OutageStore(config.db_path)
    source = ReplayDirectorySource(snapshot_dir)
    cycles = inserted = promoted = retired = 0
    record_errors = 0
    while True:
        try:
            cycle = run_poll_cycle(source, store, geocoder)
        except SourceExhausted:
            break
        cycles += 1
        inserted += cycle.inserted
        promoted += cycle.promoted
        retired += cycle.retired
        record_errors += len(cycle.record_errors)
        for message in cycle.source_errors:
            logger.warning("cycle %d: %s", cycles, message)
    click.echo(
        f"replayed {cycles} snapshots: inserted={inserted} promoted={promoted} "
        f"retired={retired} record_errors={record_errors}"
    )
    click.echo(f"store: {config.db_path}")


@main.command("index")
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(), default=None, help="rankings JSON path")
@common_options
@handle_errors
def index_command(features_csv, out, **cfg):
    """Compute vulnerability rankings from a feature table."""
    config = build_config(**cfg)
    rankings = build_rankings(load_feature_table(features_csv))
    out_path = Path(out) if out else config.rankings_path
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_json(out_path, rankings_payload(rankings))
    click.echo(f"ranked {len(rankings)} zips -> {out_path}")


@main.command("cluster")
@click.option("--out", type=click.Path(), default=None, help="clusters JSON path")
@common_options
@handle_errors
def cluster_command(out, **cfg):
    """K-means cluster the zip centroids."""
    config = build_config(**cfg)
    zip_table = geo.load_zip_table(config.zip_table_path)
    centroids = {z: (info.centroid_lat, info.centroid_lon) for z, info in zip_table.items()}
    assignment = influence.kmeans_cluster(centroids, k=config.clusters, seed=config.seed)
    out_path = Path(out) if out else config.clusters_path
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_json(out_path, assignment.to_json_dict())
    click.echo(f"clustered {len(centroids)} zips into k={config.clusters} -> {out_path}")


@main.command("fit")
@click.option("--out", type=click.Path(), default=None, help="transition matrix JSON path")
@common_options
@handle_errors
def fit_command(out, **cfg):
    """Fit the transition matrix from stored history by random sampling."""
    config = build_config(**cfg)
    store = OutageStore(config.db_path)
    clusters = load_clusters(config.clusters_path)
    series = build_series(all_history(store), config.step_hours)
    vectors = influence.build_outage_vectors(series, clusters)
    started = time.monotonic()
    transition = influence.fit_transition_matrix(
        vectors, s=config.samples, seed=config.seed
    )
    elapsed = time.monotonic() - started
    out_path = Path(out) if out else config.transition_path
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_json(out_path, transition.to_json_dict())
    click.echo(
        f"fitted {transition.k}x{transition.k} matrix over {transition.training_pairs} "
        f"pairs with s={config.samples} in {elapsed:.1f}s -> {out_path}"
    )


@main.command("predict")
@click.option("--out", type=click.Path(), default=None, help="prediction JSON path")
@click.option("--figure/--no-figure", default=True, help="render the influence graph")
@common_options
@handle_errors
def predict_command(out, figure, **cfg):
    """Predict next-step outages from the fitted matrix."""
    config = build_config(**cfg)
    if not config.transition_path.exists():
        raise GridPulseError(
            f"no fitted model at {config.transition_path}; run `gridpulse fit` first"
        )
    store = OutageStore(config.db_path)
    clusters = load_clusters(config.clusters_path)
    transition = load_transition(config.transition_path)
    series = build_series(all_history(store), config.step_hours)
    now = store.last_captured_at()
    if now is None:
        raise GridPulseError("store is empty; ingest snapshots before predicting")
    o_now = latest_complete_vector(series, clusters, now)
    payload = prediction_payload(clusters, transition, o_now)
    out_path = Path(out) if out else config.prediction_path
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_json(out_path, payload)
    click.echo(f"prediction for step after {o_now.step_index} -> {out_path}")
    if figure:
        edges = influence.top_k_edges(transition, 10)
        fig_path = out_path.with_name("influence_graph.png")
        report.save_influence_graph_figure(
            clusters, edges, fig_path, predicted=payload["o_predicted"]
        )
        click.echo(f"figure -> {fig_path}")


@main.command("analyze")
@click.option("--out", type=click.Path(), default=None, help="report directory")
@common_options
@handle_errors
def analyze_command(out, **cfg):
    """Write the statistical reports: delimited files plus figures."""
    config = build_config(**cfg)
    store = OutageStore(config.db_path)
    zip_table = geo.load_zip_table(config.zip_table_path)
    history = all_history(store)
    out_dir = Path(out) if out else config.data_dir / "reports"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    per_capita = analytics.outages_per_capita((o.borough for o in history), zip_table)
    with open(out_dir / "per_capita.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["borough", "count", "per_capita"])
        for borough, (count, rate) in per_capita.items():
            writer.writerow([borough, count, f"{rate:.8f}"])
    report.save_per_capita_figure(per_capita, out_dir / "per_capita.png")
    written += ["per_capita.csv", "per_capita.png"]

    causes = analytics.cause_histogram(o.cause for o in history)
    with open(out_dir / "causes.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cause", "count"])
        writer.writerows(causes)
    if causes:
        report.save_causes_figure(causes, out_dir / "causes.png")
        written.append("causes.png")
    written.append("causes.csv")

    series = build_series(history, config.step_hours)
    if len(series.steps) >= 2:
        matrix = analytics.transition_counts(series)
        (out_dir / "transition_bins.csv").write_text(
            analytics.transition_counts_csv(matrix), encoding="utf-8"
        )
        probabilities = analytics.row_normalize(matrix)
        (out_dir / "transition_bins_probability.csv").write_text(
            analytics.transition_counts_csv(probabilities), encoding="utf-8"
        )
        report.save_transition_bins_figure(matrix, out_dir / "transition_bins.png")
        written += ["transition_bins.csv", "transition_bins_probability.csv",
                    "transition_bins.png"]

    if config.demographics_path.exists():
        demographics = analytics.load_demographics(config.demographics_path)
        counts = zip_outage_counts(history)
        for name, demo_field, xlabel in [
            ("income", "median_income", "Median family income (USD)"),
            ("nonwhite", "pct_nonwhite", "Non-white population fraction"),
        ]:
            points = analytics.trend_points(counts, demographics, demo_field)
            if len(points) < 2:
                continue
            fit = analytics.linear_trend(points)
            save_json(
                out_dir / f"trend_{name}.json",
                {
                    "x": name, "slope": fit.slope, "intercept": fit.intercept,
                    "r": fit.r, "n": fit.n, "points": [[x, y] for x, y in points],
                },
            )
            report.save_trend_figure(points, fit, out_dir / f"trend_{name}.png", xlabel)
            written += [f"trend_{name}.json", f"trend_{name}.png"]

    click.echo(f"wrote {', '.join(written)} -> {out_dir}")


@main.command("export")
@click.option("--out", type=click.Path(), default=None, help="output directory")
@common_options
@handle_errors
def export_command(out, **cfg):
    """Export the processed and historical tables as CSV."""
    config = build_config(**cfg)
    store = OutageStore(config.db_path)
    out_dir = Path(out) if out else config.data_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    for stage in ("processed", "historical"):
        path = out_dir / f"{stage}.csv"
        path.write_bytes(store.export_csv(stage))
        click.echo(f"{stage}: {store.count(stage)} rows -> {path}")


@main.command("serve")
@click.option("--replay-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="poll snapshots from this directory instead of a live source")
@common_options
@handle_errors
def serve_command(replay_dir, **cfg):
    """Run the HTTP API (and optionally a replay poller)."""
    import threading

    import uvicorn

    from .service import ServiceRuntime, create_app

    config = build_config(**cfg)
    store = OutageStore(config.db_path)
    runtime = ServiceRuntime.from_data_dir(config, store)
    runtime.refresh()

    if replay_dir is not None:
        zip_table = geo.load_zip_table(config.zip_table_path)
        geocoder = geo.OfflineGeocoder.from_csv(config.geocoder_path, zip_table)
        source = ReplayDirectorySource(replay_dir)

        def poll_loop() -> None:
            while True:
                try:
                    run_poll_cycle(source, store, geocoder)
                except SourceExhausted:
                    logger.info("replay exhausted; poller stopping")
                    return
                except GridPulseError as exc:
                    logger.warning("poll cycle failed: %s", exc)
                runtime.refresh()
                time.sleep(config.poll_interval_minutes * 60)

        threading.Thread(target=poll_loop, daemon=True, name="poller").start()

    host, _, port = config.listen.partition(":")
    uvicorn.run(create_app(runtime), host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
