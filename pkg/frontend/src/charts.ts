// Small dependency-free SVG charts for the historical page.

import { escapeXml } from "./map.js";

export interface Bar {
  label: string;
  value: number;
}

export function renderBarChart(
  bars: Bar[],
  width = 720,
  height = 300,
  cssClass = "histogram",
): string {
  if (bars.length === 0) {
    return `<svg class="${cssClass}" viewBox="0 0 ${width} ${height}"></svg>`;
  }
  const maxValue = Math.max(...bars.map((b) => b.value), 1);
  const slot = width / bars.length;
  const barWidth = Math.max(2, slot * 0.8);
  const chartHeight = height - 40;
  const rects = bars.map((bar, i) => {
    const h = (bar.value / maxValue) * chartHeight;
    const x = i * slot + (slot - barWidth) / 2;
    const y = chartHeight - h;
    return (
      `<rect class="bar" data-label="${escapeXml(bar.label)}" x="${x.toFixed(1)}" ` +
      `y="${y.toFixed(1)}" width="${barWidth.toFixed(1)}" height="${h.toFixed(1)}" ` +
      `fill="#3b6ea5"><title>${escapeXml(`${bar.label}: ${bar.value}`)}</title></rect>`
    );
  });
  const labels = bars.length <= 16
    ? bars.map((bar, i) => {
        const x = i * slot + slot / 2;
        return (
          `<text x="${x.toFixed(1)}" y="${height - 22}" text-anchor="middle" ` +
          `font-size="10">${escapeXml(bar.label)}</text>`
        );
      })
    : [];
  return (
    `<svg class="${cssClass}" viewBox="0 0 ${width} ${height}" ` +
    `xmlns="http://www.w3.org/2000/svg">${rects.join("")}${labels.join("")}</svg>`
  );
}

/** Scatter plus the API-provided trend line; never refitted here. */
export function renderScatterWithTrend(
  points: [number, number][],
  slope: number,
  intercept: number,
  width = 720,
  height = 320,
): string {
  if (points.length === 0) {
    return `<svg class="scatter" viewBox="0 0 ${width} ${height}"></svg>`;
  }
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys, 0);
  const yMax = Math.max(...ys, 1);
  const sx = (x: number) => ((x - xMin) / (xMax - xMin || 1)) * (width - 40) + 20;
  const sy = (y: number) => height - 20 - ((y - yMin) / (yMax - yMin || 1)) * (height - 40);
  const dots = points
    .map(([x, y]) => `<circle class="dot" cx="${sx(x).toFixed(1)}" cy="${sy(y).toFixed(1)}" r="3" fill="#3b6ea5" opacity="0.7"/>`)
    .join("");
  const line =
    `<line class="trend" x1="${sx(xMin).toFixed(1)}" y1="${sy(slope * xMin + intercept).toFixed(1)}" ` +
    `x2="${sx(xMax).toFixed(1)}" y2="${sy(slope * xMax + intercept).toFixed(1)}" ` +
    `stroke="#c0392b" stroke-width="2"/>`;
  return (
    `<svg class="scatter" viewBox="0 0 ${width} ${height}" ` +
    `xmlns="http://www.w3.org/2000/svg">${dots}${line}</svg>`
  );
}
