import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { ApiClient, ApiStatusError } from "../src/api.js";
import { renderBarChart } from "../src/charts.js";
import {
  DemographicsPayload,
  historyBars,
  renderDemographicOverlay,
  renderFeatureSelector,
  renderHistoricalPage,
} from "../src/pages/historical.js";
import { renderErrorBanner } from "../src/pages/realtime.js";
import type { HistoricalPayload } from "../src/types.js";

const fixture = (name: string) =>
  JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8"));

const historical = fixture("historical.json") as HistoricalPayload;
const demographics = fixture("demographics.json") as DemographicsPayload;

describe("historical histogram", () => {
  it("renders one bar per time bucket", () => {
    const bars = historyBars(historical.rows);
    const svg = renderBarChart(bars);
    expect((svg.match(/class="bar"/g) ?? []).length).toBe(bars.length);
  });

  it("two buckets give two bars", () => {
    const rows = [
      { ...historical.rows[0]!, reported_at: "2021-06-01T04:00:00Z" },
      { ...historical.rows[0]!, reported_at: "2021-06-02T05:00:00Z" },
      { ...historical.rows[0]!, reported_at: "2021-06-02T09:00:00Z" },
    ];
    const bars = historyBars(rows);
    expect(bars).toEqual([
      { label: "2021-06-01", value: 1 },
      { label: "2021-06-02", value: 2 },
    ]);
    const svg = renderBarChart(bars);
    expect((svg.match(/class="bar"/g) ?? []).length).toBe(2);
  });

  it("shows the empty state for an empty archive", () => {
    const html = renderHistoricalPage([], demographics);
    expect(html).toContain("No historical outages recorded yet");
  });
});

describe("demographic overlay", () => {
  it("lists the seven index features in the selector", () => {
    const html = renderFeatureSelector(demographics.features, demographics.features[0]!);
    expect(demographics.features.length).toBe(7);
    for (const feature of demographics.features) {
      expect(html).toContain(`value="${feature}"`);
    }
  });

  it("renders one dot per zip with API-provided opacity", () => {
    const svg = renderDemographicOverlay(demographics, "cooling_centers");
    const dots = (svg.match(/class="zip-dot"/g) ?? []).length;
    const withCoords = demographics.zips.filter((z) => z.centroid_lat !== undefined);
    expect(dots).toBe(withCoords.length);
  });

  it("falls back to a message when demographics are unavailable", () => {
    const html = renderHistoricalPage(historical.rows, null);
    expect(html).toContain("Demographic data unavailable");
  });
});

describe("api client errors", () => {
  const failing = (status: number, body: string) => async () =>
    new Response(body, { status, headers: { "content-type": "application/json" } });

  it("surfaces the machine-readable reason", async () => {
    const api = new ApiClient("", failing(409, JSON.stringify({ reason: "model not yet fitted" })));
    await expect(api.predictions()).rejects.toThrow("model not yet fitted");
    try {
      await api.predictions();
    } catch (error) {
      expect(error).toBeInstanceOf(ApiStatusError);
      expect((error as ApiStatusError).status).toBe(409);
    }
  });

  it("renders a retry banner for outages", () => {
    const html = renderErrorBanner("Could not reach the outage service");
    expect(html).toContain("error-banner");
    expect(html).toContain("retrying");
  });
});
