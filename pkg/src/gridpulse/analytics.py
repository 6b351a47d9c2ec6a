"""Historical outage statistics: time-step bucketing, binned transition
counts, per-capita borough totals, OLS trend fits, cause histograms."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .geo import ZipInfo

# Upper limits of the seven outage-count bins; the last bin is unbounded.
BIN_UPPER_LIMITS = (1, 2, 4, 8, 16, 32, None)
N_BINS = 7

UNKNOWN_CAUSE_LABEL = "under investigation"


@dataclass(frozen=True)
class TimeStep:
    index: int
    counts_by_zip: Mapping[str, int]
    total: int


@dataclass(frozen=True)
class TimeStepSeries:
    step_duration: timedelta
    origin: datetime
    steps: tuple[TimeStep, ...]

    def totals(self) -> list[int]:
        return [step.total for step in self.steps]


def _midnight(dt: datetime) -> datetime:
    return dt.astimezone(timezone.utc).replace(hour=0, minute=0, second=0, microsecond=0)


def bucket_by_timestep(
    events: Iterable[tuple],
    step_duration: timedelta = timedelta(hours=2),
    origin: Optional[datetime] = None,
    count_active: bool = False,
) -> TimeStepSeries:
    """Bucket outages into fixed-duration half-open steps [t, t+dur).

    `events` yields (zip, start) or (zip, start, end) tuples. By default
    each outage counts once in the step containing its start; with
    count_active=True it counts in every step overlapping [start, end]
    (end required). Origin defaults to UTC midnight of the earliest start.
    Steps with zero outages are materialized between the first and last
    nonempty step.
    """
    if step_duration <= timedelta(0):
        raise ValueError("step_duration must be positive")
    items = list(events)
    if not items:
        return TimeStepSeries(
            step_duration=step_duration,
            origin=origin if origin is not None else datetime(1970, 1, 1, tzinfo=timezone.utc),
            steps=(),
        )
    if origin is None:
        origin = _midnight(min(item[1] for item in items))

    counts: dict[int, Counter] = defaultdict(Counter)
    for item in items:
        zip_code, start = item[0], item[1]
        if start < origin:
            raise ValueError(f"outage at {start.isoformat()} precedes origin {origin.isoformat()}")
        first = math.floor((start - origin) / step_duration)
        if count_active:
            if len(item) < 3 or item[2] is None:
                raise ValueError("count_active requires (zip, start, end) events")
            end = item[2]
            if end < start:
                raise ValueError(f"outage end {end.isoformat()} precedes start")
            last = math.floor((end - origin) / step_duration)
        else:
            last = first
        for idx in range(first, last + 1):
            counts[idx][zip_code] += 1

    lo, hi = min(counts), max(counts)
    steps = tuple(
        TimeStep(
            index=idx,
            counts_by_zip=dict(counts.get(idx, {})),
            total=sum(counts.get(idx, {}).values()),
        )
        for idx in range(lo, hi + 1)
    )
    return TimeStepSeries(step_duration=step_duration, origin=origin, steps=steps)


def bin_index(total: int) -> int:
    """Bin a step's outage total: 0-1, 2, 3-4, 5-8, 9-16, 17-32, 33+."""
    if total < 0:
        raise ValueError(f"outage total must be nonnegative, got {total}")
    for i, upper in enumerate(BIN_UPPER_LIMITS):
        if upper is None or total <= upper:
            return i
    raise AssertionError("unreachable")


def transition_counts(series: TimeStepSeries) -> list[list[int]]:
    """7x7 matrix counting bin transitions between consecutive steps.

    Self-transitions count; entries are raw counts summing to steps-1.
    """
    totals = series.totals()
    if len(totals) < 2:
        raise ValueError("transition counts need at least 2 time steps")
    matrix = [[0] * N_BINS for _ in range(N_BINS)]
    for prev, nxt in zip(totals, totals[1:]):
        matrix[bin_index(prev)][bin_index(nxt)] += 1
    return matrix


def row_normalize(matrix: Sequence[Sequence[int]]) -> list[list[float]]:
    """Empirical transition probabilities; all-zero rows stay zero."""
    out = []
    for row in matrix:
        total = sum(row)
        out.append([v / total if total else 0.0 for v in row])
    return out


def transition_counts_csv(matrix: Sequence[Sequence[float]]) -> str:
    """Serialize a 7x7 matrix (counts or probabilities) with a header row
    of bin upper limits."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["1", "2", "4", "8", "16", "32", "inf"])
    for row in matrix:
        writer.writerow(row)
    return buf.getvalue()


def outages_per_capita(
    boroughs_of_outages: Iterable[str],
    zip_table: Mapping[str, ZipInfo],
) -> dict[str, tuple[int, float]]:
    """Per-borough outage counts and counts per resident.

    Boroughs come from the zip table; a borough with zero total population
    is an error.
    """
    populations: Counter = Counter()
    for info in zip_table.values():
        populations[info.borough.value] += info.population
    counts: Counter = Counter(boroughs_of_outages)
    result: dict[str, tuple[int, float]] = {}
    for borough in sorted(populations):
        population = populations[borough]
        count = counts.get(borough, 0)
        if population <= 0:
            raise ValueError(f"borough {borough} has zero population")
        result[borough] = (count, count / population)
    unknown = set(counts) - set(populations)
    if unknown:
        raise ValueError(f"outages reference boroughs absent from zip table: {sorted(unknown)}")
    return result


@dataclass(frozen=True)
class TrendFit:
    slope: float
    intercept: float
    r: float
    n: int


def linear_trend(points: Sequence[tuple[float, float]]) -> TrendFit:
    """Ordinary least-squares line plus Pearson correlation."""
    n = len(points)
    if n < 2:
        raise ValueError("trend fit needs at least 2 points")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("all x values are equal; slope is undefined")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in points)
    syy = sum((y - mean_y) ** 2 for y in ys)
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    r = sxy / math.sqrt(sxx * syy) if syy > 0 else 0.0
    return TrendFit(slope=slope, intercept=intercept, r=r, n=n)


def cause_histogram(causes: Iterable[Optional[str]]) -> list[tuple[str, int]]:
    """Occurrence counts per cause label, descending, ties by label.

    Missing labels (None or blank) map to "under investigation".
    """
    counter: Counter = Counter()
    for cause in causes:
        label = (cause or "").strip() or UNKNOWN_CAUSE_LABEL
        counter[label] += 1
    return sorted(counter.items(), key=lambda item: (-item[1], item[0]))


def load_demographics(path: str | Path) -> dict[str, dict[str, float]]:
    """Load the `zip,median_income,pct_nonwhite` CSV used by trend fits."""
    table: dict[str, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            table[row["zip"].strip()] = {
                "median_income": float(row["median_income"]),
                "pct_nonwhite": float(row["pct_nonwhite"]),
            }
    return table


def trend_points(
    outage_zip_counts: Mapping[str, int],
    demographics: Mapping[str, Mapping[str, float]],
    x_field: str,
) -> list[tuple[float, float]]:
    """(demographic value, outage count) pairs for zips present in both."""
    points = []
    for zip_code, demo in sorted(demographics.items()):
        if x_field not in demo:
            raise KeyError(f"demographics for zip {zip_code} lack field {x_field!r}")
        points.append((demo[x_field], float(outage_zip_counts.get(zip_code, 0))))
    return points
