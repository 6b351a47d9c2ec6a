"""Figure rendering for the report path: every chart is written to a file
next to the delimited output it illustrates."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analytics import TrendFit
from .influence import ClusterAssignment, InfluenceEdge

BIN_LABELS = ["1", "2", "4", "8", "16", "32", "inf"]


def save_per_capita_figure(
    per_borough: Mapping[str, tuple[int, float]], path: str | Path
) -> Path:
    boroughs = sorted(per_borough)
    rates = [per_borough[b][1] for b in boroughs]
    counts = [per_borough[b][0] for b in boroughs]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    bars = ax.bar(boroughs, rates, color="#3b6ea5")
    for bar, count in zip(bars, counts):
        ax.annotate(
            f"{count}",
            (bar.get_x() + bar.get_width() / 2, bar.get_height()),
            ha="center", va="bottom", fontsize=8,
        )
    ax.set_ylabel("Outages per resident")
    ax.set_title("Outages by borough per capita")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_trend_figure(
    points: Sequence[tuple[float, float]],
    fit: TrendFit,
    path: str | Path,
    xlabel: str,
) -> Path:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.scatter(xs, ys, s=18, alpha=0.7)
    grid = np.linspace(min(xs), max(xs), 50)
    ax.plot(grid, fit.slope * grid + fit.intercept, "r-", lw=1.5,
            label=f"trend: slope={fit.slope:.4g}, r={fit.r:.3f}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("Outages per zip code")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_causes_figure(histogram: Sequence[tuple[str, int]], path: str | Path) -> Path:
    labels = [label for label, _ in histogram]
    counts = [count for _, count in histogram]
    fig, ax = plt.subplots(figsize=(7, max(3.0, 0.4 * len(labels) + 1.5)))
    ax.barh(labels[::-1], counts[::-1], color="#a55b3b")
    ax.set_xlabel("Outage count")
    ax.set_title("Outage occurrence by cause")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_transition_bins_figure(matrix: Sequence[Sequence[int]], path: str | Path) -> Path:
    data = np.asarray(matrix)
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(data, cmap="viridis")
    ax.set_xticks(range(len(BIN_LABELS)), BIN_LABELS)
    ax.set_yticks(range(len(BIN_LABELS)), BIN_LABELS)
    ax.set_xlabel("Bin upper limit at step t+1")
    ax.set_ylabel("Bin upper limit at step t")
    for i in range(data.shape[0]):
        for j in range(data.shape[1]):
            ax.text(j, i, str(data[i, j]), ha="center", va="center",
                    color="white" if data[i, j] < data.max() / 2 else "black", fontsize=8)
    fig.colorbar(im, ax=ax, label="Transitions observed")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_influence_graph_figure(
    clusters: ClusterAssignment,
    edges: Sequence[InfluenceEdge],
    path: str | Path,
    predicted: Optional[Sequence[float]] = None,
) -> Path:
    """Cluster centroids on a lat/lon plane with arrows for the strongest
    transition weights; self-influence renders as a ring at the centroid."""
    lats = [c[0] for c in clusters.centroids]
    lons = [c[1] for c in clusters.centroids]
    fig, ax = plt.subplots(figsize=(7, 7))
    ax.scatter(lons, lats, s=160, c="#3b6ea5", zorder=3)
    for idx, (lat, lon) in enumerate(clusters.centroids):
        label = str(idx)
        if predicted is not None:
            label += f"\n{predicted[idx]:.1f}"
        ax.annotate(label, (lon, lat), ha="center", va="center", fontsize=7,
                    color="white", zorder=4)
    max_weight = max((e.weight for e in edges), default=1.0) or 1.0
    for edge in edges:
        width = 0.5 + 2.5 * edge.weight / max_weight
        if edge.from_cluster == edge.to_cluster:
            lat, lon = clusters.centroids[edge.from_cluster]
            ax.scatter([lon], [lat], s=420, facecolors="none",
                       edgecolors="#c0392b", linewidths=width, zorder=2)
            continue
        flat, flon = clusters.centroids[edge.from_cluster]
        tlat, tlon = clusters.centroids[edge.to_cluster]
        ax.annotate(
            "", xy=(tlon, tlat), xytext=(flon, flat),
            arrowprops=dict(arrowstyle="-|>", lw=width, color="#c0392b"), zorder=2,
        )
    ax.set_xlabel("Longitude")
    ax.set_ylabel("Latitude")
    ax.set_title("Influence graph: strongest transition weights")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
