"""Influence-graph pipeline: k-means clustering of zip centroids,
per-cluster outage vectors, the randomized transition-matrix fit with its
exact least-squares oracle, next-step prediction, and top-edge extraction."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .analytics import TimeStepSeries
from .geo import EARTH_RADIUS_KM, haversine_km

logger = logging.getLogger(__name__)

DEFAULT_CLUSTERS = 11
DEFAULT_SAMPLES = 100_000
MAX_KMEANS_ITERATIONS = 100

# Candidates are drawn in fixed-size blocks; the block size must stay
# constant or the first-drawn-wins selection is no longer reproducible.
_CANDIDATE_BLOCK = 20_000


@dataclass(frozen=True)
class ClusterAssignment:
    k: int
    assignment: dict[str, int]
    centroids: list[tuple[float, float]]

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "assignment": dict(sorted(self.assignment.items())),
            "centroids": [[lat, lon] for lat, lon in self.centroids],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "ClusterAssignment":
        return cls(
            k=int(doc["k"]),
            assignment={str(z): int(c) for z, c in doc["assignment"].items()},
            centroids=[(float(lat), float(lon)) for lat, lon in doc["centroids"]],
        )


@dataclass(frozen=True)
class OutageVector:
    step_index: int
    counts: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=float))
        if self.counts.ndim != 1:
            raise ValueError("outage vector must be one-dimensional")
        if (self.counts < 0).any():
            raise ValueError("outage counts must be nonnegative")

    @property
    def k(self) -> int:
        return int(self.counts.shape[0])


@dataclass(frozen=True)
class TransitionMatrix:
    matrix: np.ndarray
    seed: Optional[int]
    samples: Optional[int]
    training_pairs: int
    entry_range: Optional[tuple[float, float]] = None
    per_pair_error: tuple[float, ...] = field(default=())
    residual: Optional[float] = None
    clamp_count: Optional[int] = None

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {m.shape}")
        if (m < 0).any():
            raise ValueError("transition matrix entries must be nonnegative")
        object.__setattr__(self, "matrix", m)

    @property
    def k(self) -> int:
        return int(self.matrix.shape[0])

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "samples": self.samples,
            "matrix": [[float(v) for v in row] for row in self.matrix],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "TransitionMatrix":
        matrix = np.asarray(doc["matrix"], dtype=float)
        return cls(
            matrix=matrix,
            seed=doc.get("seed"),
            samples=doc.get("samples"),
            training_pairs=int(doc.get("training_pairs", 0)),
        )


@dataclass(frozen=True)
class InfluenceEdge:
    from_cluster: int
    to_cluster: int
    weight: float


def _haversine_to_centroids(point: tuple[float, float], centroids: np.ndarray) -> np.ndarray:
    """Distances from one (lat, lon) point to each row of `centroids`."""
    lat1 = math.radians(point[0])
    lon1 = math.radians(point[1])
    lat2 = np.radians(centroids[:, 0])
    lon2 = np.radians(centroids[:, 1])
    sin_dlat = np.sin((lat2 - lat1) * 0.5)
    sin_dlon = np.sin((lon2 - lon1) * 0.5)
    h = sin_dlat**2 + math.cos(lat1) * np.cos(lat2) * sin_dlon**2
    return 2.0 * EARTH_RADIUS_KM * np.arctan2(np.sqrt(h), np.sqrt(np.maximum(0.0, 1.0 - h)))


def within_cluster_cost(
    points: Mapping[str, tuple[float, float]], assignment: Mapping[str, int], k: int
) -> float:
    """Sum of squared haversine distances from each point to its cluster's
    coordinate-mean centroid. Shared by k-means and the exhaustive oracle."""
    members: dict[int, list[tuple[float, float]]] = {c: [] for c in range(k)}
    for zip_code, cluster in assignment.items():
        members[cluster].append(points[zip_code])
    cost = 0.0
    for cluster_points in members.values():
        if not cluster_points:
            continue
        lat = sum(p[0] for p in cluster_points) / len(cluster_points)
        lon = sum(p[1] for p in cluster_points) / len(cluster_points)
        cost += sum(haversine_km(p, (lat, lon)) ** 2 for p in cluster_points)
    return cost


def kmeans_cluster(
    zip_centroids: Mapping[str, tuple[float, float]],
    k: int = DEFAULT_CLUSTERS,
    seed: int = 0,
    refine: bool = True,
    restarts: int = 64,
) -> ClusterAssignment:
    """Cluster zip centroids into k groups by haversine distance.

    Each run initializes with a sequential-insertion scheme: k seed zips
    are chosen at random, then every remaining zip (in ascending zip
    order) joins the cluster with the nearest centroid, recomputing that
    cluster's coordinate-mean centroid after each insertion. With
    refine=True (default) standard reassignment iterations follow until
    the assignment is stable or 100 iterations pass, empty clusters are
    reseeded with the point farthest from its own centroid, and the whole
    procedure is restarted with fresh seed zips (streams derived from
    `seed`); the run with the lowest within-cluster cost wins. A single
    insertion pass lands in poor local optima often enough that the
    restarts are required, not cosmetic. refine=False runs the bare
    insertion pass once.
    """
    zips = sorted(zip_centroids)
    n = len(zips)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of zips ({n})")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    coords = {z: (float(zip_centroids[z][0]), float(zip_centroids[z][1])) for z in zips}

    if not refine:
        assignment, centroids = _insertion_pass(zips, coords, k, np.random.default_rng(seed))
        return _finalize(assignment, coords, centroids, k)

    best: Optional[tuple[float, dict[str, int], np.ndarray]] = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        assignment, centroids = _insertion_pass(zips, coords, k, rng)
        for _ in range(MAX_KMEANS_ITERATIONS):
            new_assignment = {
                z: int(np.argmin(_haversine_to_centroids(coords[z], centroids))) for z in zips
            }
            _repair_empty_clusters(new_assignment, coords, centroids, k)
            if new_assignment == assignment:
                break
            assignment = new_assignment
            centroids = _recompute_centroids(assignment, coords, centroids, k)
        cost = within_cluster_cost(coords, assignment, k)
        if best is None or cost < best[0]:
            best = (cost, assignment, centroids)
    assert best is not None
    return _finalize(best[1], coords, best[2], k)


def _insertion_pass(
    zips: list[str],
    coords: Mapping[str, tuple[float, float]],
    k: int,
    rng: np.random.Generator,
) -> tuple[dict[str, int], np.ndarray]:
    seed_positions = sorted(rng.choice(len(zips), size=k, replace=False).tolist())
    seeds = [zips[i] for i in seed_positions]
    assignment: dict[str, int] = {z: c for c, z in enumerate(seeds)}
    centroids = np.array([coords[z] for z in seeds], dtype=float)
    sizes = np.ones(k)
    for z in zips:
        if z in assignment:
            continue
        c = int(np.argmin(_haversine_to_centroids(coords[z], centroids)))
        assignment[z] = c
        # running coordinate mean
        centroids[c] = (centroids[c] * sizes[c] + np.array(coords[z])) / (sizes[c] + 1)
        sizes[c] += 1
    return assignment, centroids


def _finalize(
    assignment: dict[str, int],
    coords: Mapping[str, tuple[float, float]],
    centroids: np.ndarray,
    k: int,
) -> ClusterAssignment:
    centroids = _recompute_centroids(assignment, coords, centroids, k)
    return ClusterAssignment(
        k=k,
        assignment=assignment,
        centroids=[(float(lat), float(lon)) for lat, lon in centroids],
    )


def _recompute_centroids(
    assignment: Mapping[str, int],
    coords: Mapping[str, tuple[float, float]],
    previous: np.ndarray,
    k: int,
) -> np.ndarray:
    centroids = previous.copy()
    for c in range(k):
        members = [coords[z] for z, cl in assignment.items() if cl == c]
        if members:
            centroids[c] = np.mean(np.array(members), axis=0)
    return centroids


def _repair_empty_clusters(
    assignment: dict[str, int],
    coords: Mapping[str, tuple[float, float]],
    centroids: np.ndarray,
    k: int,
) -> None:
    """Reseed each empty cluster with the point farthest from its centroid."""
    for c in range(k):
        if c in assignment.values():
            continue
        candidates = [
            (haversine_km(coords[z], tuple(centroids[assignment[z]])), z)
            for z in assignment
            if sum(1 for cl in assignment.values() if cl == assignment[z]) > 1
        ]
        if not candidates:
            continue
        _, farthest = max(candidates, key=lambda item: (item[0], item[1]))
        assignment[farthest] = c
        centroids[c] = np.array(coords[farthest])


def build_outage_vectors(
    series: TimeStepSeries, assignment: ClusterAssignment
) -> list[OutageVector]:
    """Per-step cluster count vectors; step ordering is preserved."""
    vectors = []
    for step in series.steps:
        counts = np.zeros(assignment.k)
        for zip_code, count in step.counts_by_zip.items():
            if zip_code not in assignment.assignment:
                raise KeyError(f"zip {zip_code} is not assigned to any cluster")
            counts[assignment.assignment[zip_code]] += count
        vectors.append(OutageVector(step_index=step.index, counts=counts))
    return vectors


def _pair_rng(seed: int, pair_index: int) -> np.random.Generator:
    """Independent per-pair candidate stream; parallel evaluation of pairs
    therefore yields the same winners as serial evaluation."""
    return np.random.default_rng([seed, pair_index])


def fit_transition_matrix(
    vectors: Sequence[OutageVector],
    s: int = DEFAULT_SAMPLES,
    seed: int = 0,
    entry_range: tuple[float, float] = (0.0, 1.0),
    exclude_zero_pairs: bool = False,
) -> TransitionMatrix:
    """Randomized transition-matrix fit.

    For each consecutive vector pair (o_t, o_{t+1}), draw s candidate
    matrices with i.i.d. entries uniform on [lo, hi), keep the candidate
    minimizing the squared prediction error ||o_{t+1} - C o_t||^2 (first
    drawn wins ties), and return the element-wise mean of the per-pair
    winners. Deterministic for fixed (vectors, s, seed, entry_range), and
    candidate streams are nested: the first m draws for sample count s
    equal the draws for sample count m < s.

    With exclude_zero_pairs=True, pairs whose input vector o_t is all
    zeros are dropped from the average: every candidate predicts zero
    there, so the winner is arbitrary noise.
    """
    if len(vectors) < 2:
        raise ValueError("need at least 2 outage vectors to fit")
    if s < 1:
        raise ValueError("sample count must be >= 1")
    lo, hi = float(entry_range[0]), float(entry_range[1])
    if lo < 0:
        raise ValueError("entry range lower bound must be nonnegative")
    if hi <= lo:
        raise ValueError("entry range must be a nonempty interval [lo, hi)")
    k = vectors[0].k
    for v in vectors:
        if v.k != k:
            raise ValueError("outage vectors have inconsistent dimensions")

    pair_indices = list(range(len(vectors) - 1))
    if exclude_zero_pairs:
        pair_indices = [t for t in pair_indices if vectors[t].counts.any()]
        if not pair_indices:
            raise ValueError("every pair has a zero input vector; nothing to fit")

    winners = np.zeros((len(pair_indices), k, k))
    errors = []
    for row, t in enumerate(pair_indices):
        x = vectors[t].counts
        y = vectors[t + 1].counts
        rng = _pair_rng(seed, t)
        best_error = math.inf
        best: np.ndarray | None = None
        remaining = s
        while remaining > 0:
            block = min(remaining, _CANDIDATE_BLOCK)
            candidates = rng.uniform(lo, hi, size=(block, k, k))
            residuals = candidates @ x - y
            block_errors = np.einsum("ij,ij->i", residuals, residuals)
            i = int(np.argmin(block_errors))
            if block_errors[i] < best_error:
                best_error = float(block_errors[i])
                best = candidates[i].copy()
            remaining -= block
        assert best is not None
        winners[row] = best
        errors.append(best_error)

    return TransitionMatrix(
        matrix=winners.mean(axis=0),
        seed=seed,
        samples=s,
        training_pairs=len(pair_indices),
        entry_range=(lo, hi),
        per_pair_error=tuple(errors),
    )


def fit_transition_matrix_exact(vectors: Sequence[OutageVector]) -> TransitionMatrix:
    """Exact least-squares oracle for the same objective.

    Minimizes sum_t ||o_{t+1} - T o_t||^2 over all real T via the
    minimum-norm pseudoinverse solution, then clamps negative entries to
    zero. The reported residual is measured before clamping so it lower
    bounds every sampled candidate's error.
    """
    if len(vectors) < 2:
        raise ValueError("need at least 2 outage vectors to fit")
    k = vectors[0].k
    x = np.column_stack([v.counts for v in vectors[:-1]])
    y = np.column_stack([v.counts for v in vectors[1:]])
    t = y @ np.linalg.pinv(x)
    residual = float(np.linalg.norm(y - t @ x) ** 2)
    clamp_count = int((t < 0).sum())
    return TransitionMatrix(
        matrix=np.maximum(t, 0.0),
        seed=None,
        samples=None,
        training_pairs=len(vectors) - 1,
        residual=residual,
        clamp_count=clamp_count,
    )


def predict_next(transition: TransitionMatrix, o_now: OutageVector) -> np.ndarray:
    """Expected next-step outage vector T @ o_now (real-valued)."""
    if o_now.k != transition.k:
        raise ValueError(f"dimension mismatch: matrix is {transition.k}, vector is {o_now.k}")
    return transition.matrix @ o_now.counts


def top_k_edges(transition: TransitionMatrix, k_edges: int) -> list[InfluenceEdge]:
    """The k_edges largest matrix entries as directed edges, descending.

    Diagonal self-influence entries are included; ties break by
    (from, to) ascending. Requests beyond k*k are clipped with a warning.
    """
    if k_edges < 0:
        raise ValueError("k_edges must be nonnegative")
    k = transition.k
    if k_edges > k * k:
        logger.warning("top_k_edges: requested %d edges, clipping to %d", k_edges, k * k)
        k_edges = k * k
    entries = [
        (-float(transition.matrix[i, j]), i, j) for i in range(k) for j in range(k)
    ]
    entries.sort()
    return [
        InfluenceEdge(from_cluster=i, to_cluster=j, weight=-neg)
        for neg, i, j in entries[:k_edges]
    ]
