// Influence-graph drawing: cluster centroids plus directed arrows for the
// strongest transition weights. The arrow starts at the time-t cluster and
// the head sits at the time-t+1 cluster; self-influence renders as a ring
// glyph because a zero-length arrow degenerates.

import { MapView, NYC_VIEW, project } from "./map.js";
import type { ClustersPayload, InfluenceEdge } from "./types.js";

export const MAX_ARROWS = 10;

export function renderClusterNodes(
  clusters: ClustersPayload,
  predicted: number[] | null = null,
  view: MapView = NYC_VIEW,
): string {
  return clusters.centroids
    .map((centroid, index) => {
      const { x, y } = project(view, centroid[0], centroid[1]);
      const label = predicted ? `${index}: ${predicted[index]?.toFixed(1)}` : String(index);
      return (
        `<g class="cluster" data-cluster="${index}">` +
        `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="14" fill="#3b6ea5"/>` +
        `<text x="${x.toFixed(1)}" y="${(y + 4).toFixed(1)}" text-anchor="middle" ` +
        `font-size="9" fill="#fff">${label}</text></g>`
      );
    })
    .join("\n");
}

export function renderInfluenceArrows(
  clusters: ClustersPayload,
  edges: InfluenceEdge[],
  view: MapView = NYC_VIEW,
): string {
  const drawn = edges.slice(0, MAX_ARROWS);
  const maxWeight = Math.max(...drawn.map((e) => e.weight), 1e-12);
  return drawn
    .map((edge) => {
      const width = (0.8 + 2.6 * (edge.weight / maxWeight)).toFixed(2);
      if (edge.from_cluster === edge.to_cluster) {
        const centroid = clusters.centroids[edge.from_cluster];
        if (!centroid) return "";
        const { x, y } = project(view, centroid[0], centroid[1]);
        return (
          `<circle class="arrow self-loop" data-from="${edge.from_cluster}" ` +
          `data-to="${edge.to_cluster}" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="20" ` +
          `fill="none" stroke="#c0392b" stroke-width="${width}"/>`
        );
      }
      const from = clusters.centroids[edge.from_cluster];
      const to = clusters.centroids[edge.to_cluster];
      if (!from || !to) return "";
      const p1 = project(view, from[0], from[1]);
      const p2 = project(view, to[0], to[1]);
      return (
        `<line class="arrow" data-from="${edge.from_cluster}" data-to="${edge.to_cluster}" ` +
        `x1="${p1.x.toFixed(1)}" y1="${p1.y.toFixed(1)}" x2="${p2.x.toFixed(1)}" ` +
        `y2="${p2.y.toFixed(1)}" stroke="#c0392b" stroke-width="${width}" ` +
        `marker-end="url(#arrowhead)"/>`
      );
    })
    .filter((svg) => svg !== "")
    .join("\n");
}

export const ARROWHEAD_DEFS =
  `<defs><marker id="arrowhead" markerWidth="8" markerHeight="6" refX="7" refY="3" ` +
  `orient="auto"><polygon points="0 0, 8 3, 0 6" fill="#c0392b"/></marker></defs>`;

export function countArrows(svg: string): number {
  return (svg.match(/class="arrow/g) ?? []).length;
}
