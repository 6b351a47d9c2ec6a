"""Electricity vulnerability index: min-max feature normalization, an
equally weighted composite score, and the two ordinal rankings (zip-code
ranking and per-outage severity ranking) with marker color bands."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

FEATURES = (
    "pct_elderly",
    "cooling_centers",
    "affordable_buildings",
    "affordable_units",
    "pct_below_poverty",
    "children_under_five",
    "avg_caregivers",
)

FRACTION_FEATURES = {"pct_elderly", "pct_below_poverty"}


class Color(str, Enum):
    RED = "red"
    ORANGE = "orange"
    YELLOW = "yellow"
    GREEN = "green"
    BLUE = "blue"


@dataclass(frozen=True)
class ZipFeatureRow:
    """Raw per-zip features; None marks a missing value (imputed later)."""

    zip: str
    pct_elderly: float | None = None
    cooling_centers: float | None = None
    affordable_buildings: float | None = None
    affordable_units: float | None = None
    pct_below_poverty: float | None = None
    children_under_five: float | None = None
    avg_caregivers: float | None = None

    def __post_init__(self) -> None:
        for name in FEATURES:
            value = getattr(self, name)
            if value is None:
                continue
            if name in FRACTION_FEATURES and not (0.0 <= value <= 1.0):
                raise ValueError(f"zip {self.zip}: {name}={value} outside [0, 1]")
            if name not in FRACTION_FEATURES and value < 0:
                raise ValueError(f"zip {self.zip}: {name}={value} negative")

    def value(self, feature: str) -> float | None:
        return getattr(self, feature)


@dataclass(frozen=True)
class VulnerabilityRanking:
    zip: str
    score: float
    zcr: int
    color: Color
    imputed: tuple[str, ...] = field(default=())


def load_feature_table(path: str | Path) -> list[ZipFeatureRow]:
    """Load the feature CSV; empty cells mean missing."""
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_feature_table(fh.read())


def parse_feature_table(text: str) -> list[ZipFeatureRow]:
    rows = []
    for record in csv.DictReader(io.StringIO(text)):
        values = {}
        for name in FEATURES:
            cell = (record.get(name) or "").strip()
            values[name] = float(cell) if cell else None
        rows.append(ZipFeatureRow(zip=record["zip"].strip(), **values))
    return rows


def normalize_features(
    table: Sequence[ZipFeatureRow],
) -> tuple[list[dict[str, float]], list[tuple[str, ...]]]:
    """Min-max normalize each feature column to [0, 1].

    Missing values are imputed with the column minimum (so they normalize
    to 0) and reported per row. A degenerate column (max == min, or all
    values missing) normalizes to 0 everywhere.
    """
    if not table:
        raise ValueError("feature table is empty")
    normalized = [dict[str, float]() for _ in table]
    imputed: list[list[str]] = [[] for _ in table]
    for name in FEATURES:
        present = [row.value(name) for row in table if row.value(name) is not None]
        lo = min(present) if present else 0.0
        hi = max(present) if present else 0.0
        span = hi - lo
        for i, row in enumerate(table):
            raw = row.value(name)
            if raw is None:
                imputed[i].append(name)
                raw = lo
            normalized[i][name] = (raw - lo) / span if span > 0 else 0.0
    return normalized, [tuple(names) for names in imputed]


def composite_score(normalized_row: Mapping[str, float]) -> float:
    """Equally weighted sum of the 7 normalized features, range [0, 7]."""
    return sum(normalized_row[name] for name in FEATURES)


def rank_zipcodes(scores: Mapping[str, float]) -> dict[str, int]:
    """Rank zips 1..Z by descending score; rank 1 is most vulnerable.

    Ties break by ascending zip string so rankings are reproducible.
    """
    if not scores:
        raise ValueError("no scores to rank")
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return {zip_code: rank for rank, (zip_code, _) in enumerate(ordered, start=1)}


def color_band(zcr: int) -> Color:
    """Marker color for a zip-code rank: 1-50 red, 51-100 orange,
    101-150 yellow, 151-200 green, 201+ blue."""
    if zcr < 1:
        raise ValueError(f"zcr must be >= 1, got {zcr}")
    if zcr <= 50:
        return Color.RED
    if zcr <= 100:
        return Color.ORANGE
    if zcr <= 150:
        return Color.YELLOW
    if zcr <= 200:
        return Color.GREEN
    return Color.BLUE


def rank_current_outages(
    current: Iterable[tuple[object, str, datetime]],
    zcr: Mapping[str, int],
) -> dict[object, int]:
    """Severity rank 1..N for current outages: most vulnerable zip first.

    `current` yields (outage_id, zip, reported_at). Ties break by
    ascending reported_at, then outage id.
    """
    entries = list(current)
    for outage_id, zip_code, _ in entries:
        if zip_code not in zcr:
            raise KeyError(f"zip {zip_code} has no zip-code ranking (outage {outage_id})")
    entries.sort(key=lambda e: (zcr[e[1]], e[2], e[0]))
    return {outage_id: rank for rank, (outage_id, _, _) in enumerate(entries, start=1)}


def build_rankings(table: Sequence[ZipFeatureRow]) -> list[VulnerabilityRanking]:
    """Full index pipeline: normalize, score, rank, color each zip."""
    normalized, imputed = normalize_features(table)
    scores = {row.zip: composite_score(norm) for row, norm in zip(table, normalized)}
    if len(scores) != len(table):
        raise ValueError("duplicate zip codes in feature table")
    zcr = rank_zipcodes(scores)
    flags = {row.zip: names for row, names in zip(table, imputed)}
    return sorted(
        (
            VulnerabilityRanking(
                zip=z, score=scores[z], zcr=rank, color=color_band(rank), imputed=flags[z]
            )
            for z, rank in zcr.items()
        ),
        key=lambda r: r.zcr,
    )
