// Contract: the predictions page draws exactly min(10, edges) arrows,
// with self-influence rendered as ring glyphs at the cluster centroid.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { countArrows, renderInfluenceArrows } from "../src/arrows.js";
import { renderModelMissingState, renderPredictionsPage } from "../src/pages/predictions.js";
import type { InfluenceEdge, PredictionPayload } from "../src/types.js";

const prediction = JSON.parse(
  readFileSync(join(__dirname, "fixtures", "predictions.json"), "utf-8"),
) as PredictionPayload;

function edges(n: number, selfLoops = 0): InfluenceEdge[] {
  const result: InfluenceEdge[] = [];
  for (let i = 0; i < selfLoops; i++) {
    result.push({ from_cluster: i, to_cluster: i, weight: 1 - i * 0.01 });
  }
  for (let i = selfLoops; i < n; i++) {
    result.push({
      from_cluster: i % prediction.clusters.k,
      to_cluster: (i + 1) % prediction.clusters.k,
      weight: 0.9 - i * 0.01,
    });
  }
  return result;
}

describe("recorded predictions fixture", () => {
  it("draws exactly min(10, edges) arrows", () => {
    const svg = renderInfluenceArrows(prediction.clusters, prediction.top_edges);
    expect(countArrows(svg)).toBe(Math.min(10, prediction.top_edges.length));
  });

  it("renders the full page with predicted counts per cluster", () => {
    const html = renderPredictionsPage(prediction);
    const nodes = (html.match(/class="cluster"/g) ?? []).length;
    expect(nodes).toBe(prediction.clusters.k);
    expect(countArrows(html)).toBe(Math.min(10, prediction.top_edges.length));
  });
});

describe("arrow count across edge list sizes", () => {
  it.each([0, 1, 3, 10])("%d edges yield that many arrows", (n) => {
    const svg = renderInfluenceArrows(prediction.clusters, edges(n));
    expect(countArrows(svg)).toBe(n);
  });

  it("caps at 10 arrows for longer edge lists", () => {
    const svg = renderInfluenceArrows(prediction.clusters, edges(15));
    expect(countArrows(svg)).toBe(10);
  });
});

describe("self-influence rendering", () => {
  it("renders diagonal edges as ring glyphs, not lines", () => {
    const svg = renderInfluenceArrows(prediction.clusters, edges(4, 2));
    expect((svg.match(/self-loop/g) ?? []).length).toBe(2);
    expect(countArrows(svg)).toBe(4);
  });

  it("keeps the recorded fixture's self-loops as rings", () => {
    const selfLoops = prediction.top_edges.filter((e) => e.from_cluster === e.to_cluster);
    const svg = renderInfluenceArrows(prediction.clusters, prediction.top_edges);
    expect((svg.match(/self-loop/g) ?? []).length).toBe(selfLoops.length);
  });
});

describe("model-missing state", () => {
  it("shows the placeholder instead of a map", () => {
    const html = renderModelMissingState();
    expect(html).toContain("has not been fitted");
    expect(html).not.toContain("class=\"arrow\"");
  });
});
