// Real-time page: color-coded outage map plus the Outages / Glossary /
// Team / About tabs. The outage list itemizes exactly the outages drawn
// on the map, straight from the same payload.

import { renderGlossary } from "../glossary.js";
import { escapeXml, NYC_VIEW, renderMapSvg, renderMarkers, renderTileLayer } from "../map.js";
import type { CurrentOutage, CurrentPayload } from "../types.js";

export const REALTIME_TABS = ["Outages", "Glossary", "Team", "About"] as const;

export function renderOutageList(outages: CurrentOutage[]): string {
  if (outages.length === 0) {
    return `<p class="empty-state">No outages are currently reported.</p>`;
  }
  const rows = outages.map(
    (o) =>
      `<tr class="outage-row" data-outage="${escapeXml(o.source_id)}">` +
      `<td>${o.osr}</td><td>${escapeXml(o.address)}</td><td>${escapeXml(o.borough)}</td>` +
      `<td>${escapeXml(o.zip)}</td><td>${o.zcr}</td>` +
      `<td><span class="swatch" style="background:${o.color}"></span>${o.color}</td>` +
      `<td>${escapeXml(o.cause ?? "under investigation")}</td>` +
      `<td>${escapeXml(o.reported_at)}</td></tr>`,
  );
  return (
    `<table class="outage-list"><thead><tr><th>OSR</th><th>Address</th><th>Borough</th>` +
    `<th>Zip</th><th>ZCR</th><th>Color</th><th>Cause</th><th>Reported</th></tr></thead>` +
    `<tbody>${rows.join("")}</tbody></table>`
  );
}

export function renderTabs(active: (typeof REALTIME_TABS)[number]): string {
  const buttons = REALTIME_TABS.map(
    (tab) =>
      `<button class="tab${tab === active ? " active" : ""}" data-tab="${tab}">${tab}</button>`,
  );
  return `<nav class="tabs">${buttons.join("")}</nav>`;
}

export function renderTeamTab(): string {
  return `<p class="placeholder">Project team information goes here.</p>`;
}

export function renderAboutTab(): string {
  return (
    `<p class="placeholder">This dashboard tracks electricity outages, ranks the ` +
    `affected zip codes by socio-demographic vulnerability, and predicts where ` +
    `outages are likely next. Data refreshes on the server's poll cadence.</p>`
  );
}

export function renderRealtimePage(
  payload: CurrentPayload,
  tileUrl: string | null = null,
  activeTab: (typeof REALTIME_TABS)[number] = "Outages",
): string {
  const layers = [renderTileLayer(NYC_VIEW, tileUrl), renderMarkers(payload.outages)];
  const tabContent =
    activeTab === "Outages"
      ? renderOutageList(payload.outages)
      : activeTab === "Glossary"
        ? renderGlossary()
        : activeTab === "Team"
          ? renderTeamTab()
          : renderAboutTab();
  return (
    `<section class="page realtime">` +
    `<div class="map-panel">${renderMapSvg(layers)}</div>` +
    `<div class="side-panel">${renderTabs(activeTab)}` +
    `<div class="tab-content">${tabContent}</div></div></section>`
  );
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner" role="alert">${escapeXml(message)} — retrying…</div>`;
}
