// Entry point: hash routing between the four pages, periodic refresh on
// the cadence the service reports, last-write-wins rendering per page.

import { ApiClient, ApiStatusError } from "./api.js";
import { renderDownloadsPage } from "./pages/downloads.js";
import { DemographicsPayload, renderHistoricalPage } from "./pages/historical.js";
import { renderModelMissingState, renderPredictionsPage } from "./pages/predictions.js";
import { renderErrorBanner, renderRealtimePage, REALTIME_TABS } from "./pages/realtime.js";

type PageName = "realtime" | "historical" | "predictions" | "downloads";

const PAGES: PageName[] = ["realtime", "historical", "predictions", "downloads"];

declare global {
  interface Window {
    GRIDPULSE_API_BASE?: string;
    GRIDPULSE_TILE_URL?: string;
  }
}

const api = new ApiClient(window.GRIDPULSE_API_BASE ?? "");
const tileUrl = window.GRIDPULSE_TILE_URL ?? null;

let activeTab: (typeof REALTIME_TABS)[number] = "Outages";
let renderEpoch = 0;

function currentPage(): PageName {
  const hash = window.location.hash.replace("#/", "");
  return (PAGES as string[]).includes(hash) ? (hash as PageName) : "realtime";
}

function mount(html: string): void {
  const root = document.getElementById("app");
  if (root) {
    root.innerHTML = html;
  }
}

async function renderPage(): Promise<void> {
  const epoch = ++renderEpoch;
  const page = currentPage();
  const apply = (html: string) => {
    if (epoch === renderEpoch) {
      mount(html);
      wireTabButtons();
    }
  };
  try {
    if (page === "realtime") {
      const payload = await api.currentOutages();
      apply(renderRealtimePage(payload, tileUrl, activeTab));
    } else if (page === "historical") {
      const rows = (await api.historical({ page_size: "500" })).rows;
      let demographics: DemographicsPayload | null = null;
      try {
        const res = await fetch(`${window.GRIDPULSE_API_BASE ?? ""}/api/demographics`);
        if (res.ok) {
          demographics = (await res.json()) as DemographicsPayload;
        }
      } catch {
        demographics = null;
      }
      apply(renderHistoricalPage(rows, demographics));
    } else if (page === "predictions") {
      try {
        apply(renderPredictionsPage(await api.predictions()));
      } catch (error) {
        if (error instanceof ApiStatusError && error.status === 409) {
          apply(renderModelMissingState());
        } else {
          throw error;
        }
      }
    } else {
      apply(renderDownloadsPage(api));
    }
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error);
    apply(renderErrorBanner(`Could not reach the outage service (${message})`));
    setTimeout(renderPage, 5_000);
  }
}

function wireTabButtons(): void {
  for (const button of document.querySelectorAll<HTMLButtonElement>(".tabs .tab")) {
    button.addEventListener("click", () => {
      activeTab = button.dataset.tab as (typeof REALTIME_TABS)[number];
      void renderPage();
    });
  }
}

async function schedulePolling(): Promise<void> {
  let minutes = 30;
  try {
    minutes = (await api.config()).poll_interval_minutes;
  } catch {
    // keep the default cadence when the config endpoint is unreachable
  }
  setInterval(() => void renderPage(), minutes * 60 * 1000);
}

window.addEventListener("hashchange", () => void renderPage());
void renderPage();
void schedulePolling();
