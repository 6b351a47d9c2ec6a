// Minimal slippy-map rendering: a Web-Mercator projection over the NYC
// extent, an optional raster tile layer from a configurable public
// provider, and SVG outage markers whose fill is the API's color field.

import type { CurrentOutage } from "./types.js";

export interface MapView {
  latMin: number;
  latMax: number;
  lonMin: number;
  lonMax: number;
  width: number;
  height: number;
}

export const NYC_VIEW: MapView = {
  latMin: 40.4,
  latMax: 41.0,
  lonMin: -74.3,
  lonMax: -73.6,
  width: 760,
  height: 760,
};

function mercatorY(latDeg: number): number {
  const lat = (latDeg * Math.PI) / 180;
  return Math.log(Math.tan(Math.PI / 4 + lat / 2));
}

/** Project (lat, lon) onto view pixels; y grows downward. */
export function project(view: MapView, lat: number, lon: number): { x: number; y: number } {
  const x = ((lon - view.lonMin) / (view.lonMax - view.lonMin)) * view.width;
  const yTop = mercatorY(view.latMax);
  const yBottom = mercatorY(view.latMin);
  const y = ((yTop - mercatorY(lat)) / (yTop - yBottom)) * view.height;
  return { x, y };
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * One circle per outage; fill is exactly the payload color. The popup
 * content (address, cause, reported_at, ZCR/OSR) rides along in a <title>
 * element so plain SVG tooltips work without extra wiring.
 */
export function renderMarkers(outages: CurrentOutage[], view: MapView = NYC_VIEW): string {
  const markers = outages.map((outage) => {
    const centroid = outageLatLon(outage, view);
    const { x, y } = project(view, centroid.lat, centroid.lon);
    const label =
      `${outage.address} | cause: ${outage.cause ?? "under investigation"} | ` +
      `reported: ${outage.reported_at} | ZCR ${outage.zcr} | OSR ${outage.osr}`;
    return (
      `<circle class="marker" data-outage="${escapeXml(outage.source_id)}" ` +
      `cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="7" fill="${outage.color}" ` +
      `stroke="#222" stroke-width="1"><title>${escapeXml(label)}</title></circle>`
    );
  });
  return markers.join("\n");
}

// Outage payloads carry zip-level geography only; markers sit at a
// deterministic spot derived from the zip string so same-zip outages
// cluster visibly without overlapping exactly.
export function outageLatLon(outage: CurrentOutage, view: MapView): { lat: number; lon: number } {
  let hash = 2166136261;
  for (const ch of outage.zip + outage.source_id) {
    hash = (hash ^ ch.charCodeAt(0)) >>> 0;
    hash = (hash * 16777619) >>> 0;
  }
  const latSpan = view.latMax - view.latMin;
  const lonSpan = view.lonMax - view.lonMin;
  const zipNum = Number(outage.zip) % 997;
  const lat = view.latMin + latSpan * (0.15 + 0.7 * (zipNum / 997));
  const lon = view.lonMin + lonSpan * (0.15 + 0.7 * ((hash % 1000) / 1000));
  return { lat, lon };
}

/** Raster tile layer for a z/x/y template URL; empty when unconfigured. */
export function renderTileLayer(
  view: MapView,
  tileUrlTemplate: string | null,
  zoom = 11,
): string {
  if (!tileUrlTemplate) {
    return "";
  }
  const tiles: string[] = [];
  const n = 2 ** zoom;
  const tileX = (lon: number) => Math.floor(((lon + 180) / 360) * n);
  const tileY = (lat: number) => {
    const rad = (lat * Math.PI) / 180;
    return Math.floor(((1 - Math.asinh(Math.tan(rad)) / Math.PI) / 2) * n);
  };
  const x0 = tileX(view.lonMin);
  const x1 = tileX(view.lonMax);
  const y0 = tileY(view.latMax);
  const y1 = tileY(view.latMin);
  for (let x = x0; x <= x1; x++) {
    for (let y = y0; y <= y1; y++) {
      const lonLeft = (x / n) * 360 - 180;
      const lonRight = ((x + 1) / n) * 360 - 180;
      const latTop = (Math.atan(Math.sinh(Math.PI * (1 - (2 * y) / n))) * 180) / Math.PI;
      const latBottom = (Math.atan(Math.sinh(Math.PI * (1 - (2 * (y + 1)) / n))) * 180) / Math.PI;
      const topLeft = project(view, latTop, lonLeft);
      const bottomRight = project(view, latBottom, lonRight);
      const url = tileUrlTemplate
        .replace("{z}", String(zoom))
        .replace("{x}", String(x))
        .replace("{y}", String(y));
      tiles.push(
        `<image href="${escapeXml(url)}" x="${topLeft.x.toFixed(1)}" y="${topLeft.y.toFixed(1)}" ` +
        `width="${(bottomRight.x - topLeft.x).toFixed(1)}" ` +
        `height="${(bottomRight.y - topLeft.y).toFixed(1)}" opacity="0.85"/>`,
      );
    }
  }
  return tiles.join("\n");
}

export function renderMapSvg(layers: string[], view: MapView = NYC_VIEW): string {
  return (
    `<svg class="map" viewBox="0 0 ${view.width} ${view.height}" ` +
    `xmlns="http://www.w3.org/2000/svg" role="img">` +
    `<rect width="${view.width}" height="${view.height}" fill="#eef3f6"/>` +
    layers.join("\n") +
    `</svg>`
  );
}
