// Predictions page: cluster map with the strongest influence arrows and
// the predicted next-step count labeled on every cluster.

import { ARROWHEAD_DEFS, renderClusterNodes, renderInfluenceArrows } from "../arrows.js";
import { renderMapSvg } from "../map.js";
import type { PredictionPayload } from "../types.js";

export function renderPredictionsPage(payload: PredictionPayload): string {
  const arrows = renderInfluenceArrows(payload.clusters, payload.top_edges);
  const nodes = renderClusterNodes(payload.clusters, payload.o_predicted);
  const totalNow = payload.o_now.reduce((a, b) => a + b, 0);
  const totalPredicted = payload.o_predicted.reduce((a, b) => a + b, 0);
  return (
    `<section class="page predictions">` +
    `<div class="map-panel">${renderMapSvg([ARROWHEAD_DEFS, arrows, nodes])}</div>` +
    `<div class="side-panel"><h2>Next time step</h2>` +
    `<p>Current outages: <strong>${totalNow.toFixed(0)}</strong></p>` +
    `<p>Predicted next step: <strong>${totalPredicted.toFixed(1)}</strong></p>` +
    `<p class="note">Arrows show the ${Math.min(10, payload.top_edges.length)} strongest ` +
    `transition weights; rings mark self-influence.</p></div></section>`
  );
}

export function renderModelMissingState(): string {
  return (
    `<section class="page predictions"><p class="empty-state">` +
    `The prediction model has not been fitted yet. Run the pipeline's fit ` +
    `step and refresh.</p></section>`
  );
}
