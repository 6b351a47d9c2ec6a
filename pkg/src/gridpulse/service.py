"""Read-only HTTP API backing the dashboard's four pages.

All model artifacts are recomputed by refresh() into an immutable
snapshot that is swapped atomically; request handlers only ever read the
snapshot, so repeated GETs between poll cycles return identical payloads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse, Response

from . import analytics
from .artifacts import (
    build_series,
    latest_complete_vector,
    load_clusters,
    load_transition,
    outage_row,
    prediction_payload,
    rankings_payload,
    zip_outage_counts,
)
from .config import ApiConfig
from .errors import GridPulseError
from .influence import ClusterAssignment, TransitionMatrix
from .store import OutageStore, all_history
from .timefmt import parse_rfc3339
from .vulnerability import (
    FEATURES,
    VulnerabilityRanking,
    build_rankings,
    normalize_features,
    rank_current_outages,
)

logger = logging.getLogger(__name__)

TREND_FIELDS = {"income": "median_income", "nonwhite": "pct_nonwhite"}
MIN_TREND_POINTS = 2
MIN_TRANSITION_STEPS = 2


@dataclass(frozen=True)
class ArtifactSnapshot:
    """Immutable per-cycle view served to all requests."""

    current: list[dict] = field(default_factory=list)
    rankings: Optional[dict] = None
    demographics_map: Optional[dict] = None
    per_capita: Optional[dict] = None
    trends: dict[str, dict] = field(default_factory=dict)
    causes: Optional[dict] = None
    transition_bins: Optional[dict] = None
    prediction: Optional[dict] = None
    errors: dict[str, str] = field(default_factory=dict)


class ServiceRuntime:
    """Owns the store and input tables and rebuilds the artifact snapshot."""

    def __init__(
        self,
        config: ApiConfig,
        store: OutageStore,
        zip_table: dict,
        feature_rows: list,
        demographics: Optional[dict] = None,
        clusters: Optional[ClusterAssignment] = None,
        transition: Optional[TransitionMatrix] = None,
    ):
        self.config = config
        self.store = store
        self.zip_table = zip_table
        self.feature_rows = feature_rows
        self.demographics = demographics or {}
        self.clusters = clusters
        self.transition = transition
        self._snapshot: Optional[ArtifactSnapshot] = None

    @classmethod
    def from_data_dir(cls, config: ApiConfig, store: OutageStore) -> "ServiceRuntime":
        from . import geo
        from .vulnerability import load_feature_table

        zip_table = geo.load_zip_table(config.zip_table_path)
        feature_rows = load_feature_table(config.features_path)
        demographics = (
            analytics.load_demographics(config.demographics_path)
            if config.demographics_path.exists()
            else {}
        )
        clusters = (
            load_clusters(config.clusters_path) if config.clusters_path.exists() else None
        )
        transition = (
            load_transition(config.transition_path) if config.transition_path.exists() else None
        )
        return cls(config, store, zip_table, feature_rows, demographics, clusters, transition)

    @property
    def snapshot(self) -> Optional[ArtifactSnapshot]:
        return self._snapshot

    def refresh(self) -> ArtifactSnapshot:
        """Recompute every derived payload and swap it in atomically."""
        errors: dict[str, str] = {}
        rankings: list[VulnerabilityRanking] = []
        current_rows: list[dict] = []
        try:
            rankings = build_rankings(self.feature_rows)
        except (GridPulseError, ValueError, KeyError) as exc:
            errors["rankings"] = str(exc)

        if rankings:
            zcr = {r.zip: r.zcr for r in rankings}
            color = {r.zip: r.color.value for r in rankings}
            try:
                current = self.store.query("processed")
                osr = rank_current_outages(
                    ((o.internal_id, o.zip, o.reported_at) for o in current), zcr
                )
                for outage in current:
                    row = outage_row(outage)
                    row.update(
                        zcr=zcr[outage.zip],
                        osr=osr[outage.internal_id],
                        color=color[outage.zip],
                    )
                    current_rows.append(row)
                current_rows.sort(key=lambda r: r["osr"])
            except (GridPulseError, ValueError, KeyError) as exc:
                errors["current"] = str(exc)

        demographics_map = None
        if rankings:
            try:
                demographics_map = self._demographics_map(rankings)
            except (ValueError, KeyError) as exc:
                errors["demographics_map"] = str(exc)

        history = all_history(self.store)
        per_capita = None
        try:
            rates = analytics.outages_per_capita((o.borough for o in history), self.zip_table)
            per_capita = {
                "boroughs": [
                    {"borough": b, "count": c, "per_capita": rate}
                    for b, (c, rate) in rates.items()
                ]
            }
        except ValueError as exc:
            errors["per_capita"] = str(exc)

        trends: dict[str, dict] = {}
        counts_by_zip = zip_outage_counts(history)
        for name, demo_field in TREND_FIELDS.items():
            try:
                points = analytics.trend_points(counts_by_zip, self.demographics, demo_field)
                if len(points) >= MIN_TREND_POINTS:
                    fit = analytics.linear_trend(points)
                    trends[name] = {
                        "x": name,
                        "slope": fit.slope,
                        "intercept": fit.intercept,
                        "r": fit.r,
                        "n": fit.n,
                        "points": [[x, y] for x, y in points],
                    }
            except (ValueError, KeyError) as exc:
                errors[f"trend_{name}"] = str(exc)

        causes = {
            "causes": [
                {"cause": label, "count": count}
                for label, count in analytics.cause_histogram(o.cause for o in history)
            ]
        }

        series = build_series(history, self.config.step_hours)
        transition_bins = None
        if len(series.steps) >= MIN_TRANSITION_STEPS:
            matrix = analytics.transition_counts(series)
            transition_bins = {
                "bin_upper_limits": list(analytics.BIN_UPPER_LIMITS),
                "matrix": matrix,
                "pairs": len(series.steps) - 1,
            }

        prediction = None
        if self.clusters is not None and self.transition is not None:
            try:
                now = self.store.last_captured_at()
                if now is not None:
                    o_now = latest_complete_vector(series, self.clusters, now)
                    prediction = prediction_payload(self.clusters, self.transition, o_now)
            except (GridPulseError, ValueError, KeyError) as exc:
                errors["prediction"] = str(exc)

        snapshot = ArtifactSnapshot(
            current=current_rows,
            rankings=rankings_payload(rankings) if rankings else None,
            demographics_map=demographics_map,
            per_capita=per_capita,
            trends=trends,
            causes=causes,
            transition_bins=transition_bins,
            prediction=prediction,
            errors=errors,
        )
        self._snapshot = snapshot
        if errors:
            logger.warning("artifact refresh completed with errors: %s", errors)
        return snapshot

    def _demographics_map(self, rankings: list[VulnerabilityRanking]) -> dict:
        """Per-zip feature values (raw and normalized) plus ranking and
        centroid, so the dashboard overlay displays without recomputing."""
        normalized, _ = normalize_features(self.feature_rows)
        by_zip = {r.zip: r for r in rankings}
        zips = []
        for row, norm in zip(self.feature_rows, normalized):
            ranking = by_zip[row.zip]
            info = self.zip_table.get(row.zip)
            entry = {
                "zip": row.zip,
                "score": ranking.score,
                "zcr": ranking.zcr,
                "color": ranking.color.value,
                "features": {name: row.value(name) for name in FEATURES},
                "features_normalized": {name: norm[name] for name in FEATURES},
            }
            if info is not None:
                entry["centroid_lat"] = info.centroid_lat
                entry["centroid_lon"] = info.centroid_lon
                entry["borough"] = info.borough.value
                entry["population"] = info.population
            zips.append(entry)
        zips.sort(key=lambda e: e["zip"])
        return {"features": list(FEATURES), "zips": zips}


def _error(status: int, reason: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"reason": reason, **extra})


def create_app(runtime: ServiceRuntime) -> FastAPI:
    app = FastAPI(title="gridpulse", version="0.1.0")
    # the API is read-only, so the dashboard may be served from any origin
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["GET"])

    def snap() -> Optional[ArtifactSnapshot]:
        return runtime.snapshot

    @app.get("/api/outages/current")
    def current_outages():
        snapshot = snap()
        if snapshot is None:
            return _error(503, "index unavailable", detail="no artifact snapshot computed yet")
        if "current" in snapshot.errors or "rankings" in snapshot.errors:
            detail = snapshot.errors.get("current", snapshot.errors.get("rankings", ""))
            return _error(503, "index unavailable", detail=detail)
        return {"outages": snapshot.current}

    @app.get("/api/outages/historical")
    def historical_outages(
        from_: Optional[str] = Query(default=None, alias="from"),
        to: Optional[str] = None,
        zip: Optional[str] = None,
        borough: Optional[str] = None,
        page: int = 1,
        page_size: int = 100,
    ):
        try:
            reported_from = parse_rfc3339(from_) if from_ else None
            reported_to = parse_rfc3339(to) if to else None
        except ValueError as exc:
            return _error(400, "invalid time range", detail=str(exc))
        try:
            rows = runtime.store.query(
                "historical",
                reported_from=reported_from,
                reported_to=reported_to,
                zip_code=zip,
                borough=borough,
                page=page,
                page_size=page_size,
            )
        except ValueError as exc:
            return _error(400, "invalid query", detail=str(exc))
        return {"page": page, "page_size": page_size, "rows": [outage_row(o) for o in rows]}

    @app.get("/api/demographics")
    def demographics():
        snapshot = snap()
        if snapshot is None or snapshot.demographics_map is None:
            detail = snapshot.errors.get("demographics_map", "no snapshot") if snapshot else "no snapshot"
            return _error(503, "demographics unavailable", detail=detail)
        return snapshot.demographics_map

    @app.get("/api/analytics/per-capita")
    def per_capita():
        snapshot = snap()
        if snapshot is None or snapshot.per_capita is None:
            detail = (snapshot.errors.get("per_capita", "") if snapshot else "no snapshot")
            return _error(503, "analytics unavailable", detail=detail)
        return snapshot.per_capita

    @app.get("/api/analytics/trend")
    def trend(x: str = "income"):
        if x not in TREND_FIELDS:
            return _error(400, "unknown trend axis", allowed=sorted(TREND_FIELDS))
        snapshot = snap()
        if snapshot is None:
            return _error(503, "analytics unavailable", detail="no snapshot")
        payload = snapshot.trends.get(x)
        if payload is None:
            return _error(
                409, "insufficient data", required_minimum=MIN_TREND_POINTS,
                detail=f"need at least {MIN_TREND_POINTS} zips with demographics",
            )
        return payload

    @app.get("/api/analytics/causes")
    def causes():
        snapshot = snap()
        if snapshot is None or snapshot.causes is None:
            return _error(503, "analytics unavailable", detail="no snapshot")
        return snapshot.causes

    @app.get("/api/analytics/transition-bins")
    def transition_bins():
        snapshot = snap()
        if snapshot is None:
            return _error(503, "analytics unavailable", detail="no snapshot")
        if snapshot.transition_bins is None:
            return _error(
                409, "insufficient data", required_minimum=MIN_TRANSITION_STEPS,
                detail=f"need at least {MIN_TRANSITION_STEPS} time steps",
            )
        return snapshot.transition_bins

    @app.get("/api/predictions/next")
    def predictions():
        snapshot = snap()
        if snapshot is None:
            return _error(503, "predictions unavailable", detail="no snapshot")
        if snapshot.prediction is None:
            return _error(409, "model not yet fitted", detail=snapshot.errors.get("prediction", ""))
        return snapshot.prediction

    @app.get("/api/downloads/{name}")
    def downloads(name: str):
        if not name.endswith(".csv"):
            return _error(404, "unknown download")
        stage = name[: -len(".csv")]
        if stage not in ("processed", "historical"):
            return _error(404, "unknown download")
        return Response(content=runtime.store.export_csv(stage), media_type="text/csv")

    @app.get("/api/config")
    def config():
        cfg = runtime.config
        return {
            "poll_interval_minutes": cfg.poll_interval_minutes,
            "step_hours": cfg.step_hours,
            "clusters": cfg.clusters,
            "samples": cfg.samples,
            "seed": cfg.seed,
        }

    return app
