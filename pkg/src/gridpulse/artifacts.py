"""Artifact payload builders and JSON file I/O shared by the CLI and the
HTTP service, so CLI outputs are served without transformation."""

from __future__ import annotations

import json
import math
from datetime import datetime, timedelta
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .analytics import TimeStepSeries, bucket_by_timestep
from .influence import (
    ClusterAssignment,
    OutageVector,
    TransitionMatrix,
    predict_next,
    top_k_edges,
)
from .store import OutageStore, StoredOutage, all_history
from .timefmt import format_rfc3339
from .vulnerability import VulnerabilityRanking

TOP_EDGE_COUNT = 10


def rankings_payload(rankings: Sequence[VulnerabilityRanking]) -> dict:
    return {
        "count": len(rankings),
        "rankings": [
            {
                "zip": r.zip,
                "score": r.score,
                "zcr": r.zcr,
                "color": r.color.value,
                "imputed": list(r.imputed),
            }
            for r in rankings
        ],
    }


def build_series(history: Sequence[StoredOutage], step_hours: int) -> TimeStepSeries:
    return bucket_by_timestep(
        ((o.zip, o.reported_at) for o in history),
        step_duration=timedelta(hours=step_hours),
    )


def latest_complete_vector(
    series: TimeStepSeries,
    clusters: ClusterAssignment,
    now: datetime,
) -> OutageVector:
    """Cluster counts for the last fully elapsed time step before `now`.

    Steps the series never materialized (no outages) yield a zero vector.
    """
    if not series.steps:
        return OutageVector(step_index=0, counts=np.zeros(clusters.k))
    current = math.floor((now - series.origin) / series.step_duration)
    target = current - 1
    for step in series.steps:
        if step.index == target:
            counts = np.zeros(clusters.k)
            for zip_code, count in step.counts_by_zip.items():
                counts[clusters.assignment[zip_code]] += count
            return OutageVector(step_index=target, counts=counts)
    return OutageVector(step_index=target, counts=np.zeros(clusters.k))


def prediction_payload(
    clusters: ClusterAssignment,
    transition: TransitionMatrix,
    o_now: OutageVector,
) -> dict:
    predicted = predict_next(transition, o_now)
    edges = top_k_edges(transition, TOP_EDGE_COUNT)
    return {
        "clusters": clusters.to_json_dict(),
        "o_now": [float(v) for v in o_now.counts],
        "o_predicted": [float(v) for v in predicted],
        "top_edges": [
            {"from_cluster": e.from_cluster, "to_cluster": e.to_cluster, "weight": e.weight}
            for e in edges
        ],
    }


def outage_row(outage: StoredOutage) -> dict:
    row = {
        "internal_id": outage.internal_id,
        "source_id": outage.source_id,
        "address": outage.address,
        "zip": outage.zip,
        "borough": outage.borough,
        "cause": outage.cause,
        "reported_at": format_rfc3339(outage.reported_at),
        "first_seen_at": format_rfc3339(outage.first_seen_at),
    }
    if outage.ended_at is not None:
        row["ended_at"] = format_rfc3339(outage.ended_at)
    return row


def zip_outage_counts(history: Sequence[StoredOutage]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for outage in history:
        counts[outage.zip] = counts.get(outage.zip, 0) + 1
    return counts


def save_json(path: str | Path, payload: Mapping) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def load_clusters(path: str | Path) -> ClusterAssignment:
    return ClusterAssignment.from_json_dict(load_json(path))


def load_transition(path: str | Path) -> TransitionMatrix:
    return TransitionMatrix.from_json_dict(load_json(path))


def history_or_empty(store: Optional[OutageStore]) -> list[StoredOutage]:
    return all_history(store) if store is not None else []
