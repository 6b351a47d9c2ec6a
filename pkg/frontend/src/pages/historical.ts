// Historical page: outage-over-time histogram plus the demographic
// overlay map with a per-feature selector.

import { Bar, renderBarChart } from "../charts.js";
import { escapeXml, NYC_VIEW, project, renderMapSvg } from "../map.js";
import type { HistoricalRow } from "../types.js";

export interface DemographicZip {
  zip: string;
  score: number;
  zcr: number;
  color: string;
  features: Record<string, number | null>;
  features_normalized: Record<string, number>;
  centroid_lat?: number;
  centroid_lon?: number;
  borough?: string;
  population?: number;
}

export interface DemographicsPayload {
  features: string[];
  zips: DemographicZip[];
}

/** One bar per UTC day present in the archive rows. */
export function historyBars(rows: HistoricalRow[]): Bar[] {
  const byDay = new Map<string, number>();
  for (const row of rows) {
    const day = row.reported_at.slice(0, 10);
    byDay.set(day, (byDay.get(day) ?? 0) + 1);
  }
  return [...byDay.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([label, value]) => ({ label, value }));
}

export function renderFeatureSelector(features: string[], selected: string): string {
  const options = features.map(
    (f) =>
      `<option value="${escapeXml(f)}"${f === selected ? " selected" : ""}>` +
      `${escapeXml(f)}</option>`,
  );
  return `<select class="feature-selector">${options.join("")}</select>`;
}

/**
 * Demographic overlay: one dot per zip at its centroid, opacity straight
 * from the API's normalized feature value (no rescaling in the UI).
 */
export function renderDemographicOverlay(
  payload: DemographicsPayload,
  feature: string,
): string {
  const dots = payload.zips
    .filter((z) => z.centroid_lat !== undefined && z.centroid_lon !== undefined)
    .map((z) => {
      const { x, y } = project(NYC_VIEW, z.centroid_lat as number, z.centroid_lon as number);
      const weight = z.features_normalized[feature] ?? 0;
      const raw = z.features[feature];
      const label = `${z.zip} | ${feature}: ${raw ?? "missing"} | ZCR ${z.zcr}`;
      return (
        `<circle class="zip-dot" data-zip="${escapeXml(z.zip)}" cx="${x.toFixed(1)}" ` +
        `cy="${y.toFixed(1)}" r="9" fill="#6a4c93" ` +
        `opacity="${(0.15 + 0.85 * weight).toFixed(3)}">` +
        `<title>${escapeXml(label)}</title></circle>`
      );
    });
  return dots.join("\n");
}

export function renderHistoricalPage(
  rows: HistoricalRow[],
  demographics: DemographicsPayload | null,
  selectedFeature?: string,
): string {
  const bars = historyBars(rows);
  const histogram =
    bars.length === 0
      ? `<p class="empty-state">No historical outages recorded yet.</p>`
      : renderBarChart(bars);
  let overlay = `<p class="empty-state">Demographic data unavailable.</p>`;
  if (demographics !== null && demographics.features.length > 0) {
    const feature = selectedFeature ?? (demographics.features[0] as string);
    overlay =
      renderFeatureSelector(demographics.features, feature) +
      renderMapSvg([renderDemographicOverlay(demographics, feature)]);
  }
  return (
    `<section class="page historical">` +
    `<div class="panel"><h2>Outages over time</h2>${histogram}</div>` +
    `<div class="panel"><h2>Demographics by zip</h2>${overlay}</div>` +
    `</section>`
  );
}
