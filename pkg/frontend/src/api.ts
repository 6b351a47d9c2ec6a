import type {
  CausesPayload,
  ConfigPayload,
  CurrentPayload,
  HistoricalPayload,
  PerCapitaPayload,
  PredictionPayload,
  TransitionBinsPayload,
  TrendPayload,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiStatusError extends Error {
  constructor(public status: number, public reason: string) {
    super(`HTTP ${status}: ${reason}`);
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(`${this.base}${path}`);
    if (!res.ok) {
      let reason = res.statusText;
      try {
        reason = ((await res.json()) as { reason?: string }).reason ?? reason;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiStatusError(res.status, reason);
    }
    return (await res.json()) as T;
  }

  currentOutages(): Promise<CurrentPayload> {
    return this.getJson("/api/outages/current");
  }

  historical(params: Record<string, string> = {}): Promise<HistoricalPayload> {
    const query = new URLSearchParams(params).toString();
    return this.getJson(`/api/outages/historical${query ? `?${query}` : ""}`);
  }

  perCapita(): Promise<PerCapitaPayload> {
    return this.getJson("/api/analytics/per-capita");
  }

  trend(x: "income" | "nonwhite"): Promise<TrendPayload> {
    return this.getJson(`/api/analytics/trend?x=${x}`);
  }

  causes(): Promise<CausesPayload> {
    return this.getJson("/api/analytics/causes");
  }

  transitionBins(): Promise<TransitionBinsPayload> {
    return this.getJson("/api/analytics/transition-bins");
  }

  predictions(): Promise<PredictionPayload> {
    return this.getJson("/api/predictions/next");
  }

  config(): Promise<ConfigPayload> {
    return this.getJson("/api/config");
  }

  downloadUrl(table: "processed" | "historical"): string {
    return `${this.base}/api/downloads/${table}.csv`;
  }

  /** Raw CSV bytes, passed through without any decoding or reshaping. */
  async downloadCsv(table: "processed" | "historical"): Promise<Uint8Array> {
    const res = await this.fetchImpl(this.downloadUrl(table));
    if (!res.ok) {
      throw new ApiStatusError(res.status, res.statusText);
    }
    return new Uint8Array(await res.arrayBuffer());
  }
}
