// Payload shapes of the gridpulse HTTP API. The UI displays these values
// verbatim; rankings, colors and predictions are never recomputed here.

export type MarkerColor = "red" | "orange" | "yellow" | "green" | "blue";

export interface CurrentOutage {
  internal_id: number;
  source_id: string;
  address: string;
  zip: string;
  borough: string;
  cause: string | null;
  reported_at: string;
  first_seen_at: string;
  zcr: number;
  osr: number;
  color: MarkerColor;
}

export interface CurrentPayload {
  outages: CurrentOutage[];
}

export interface HistoricalRow {
  internal_id: number;
  source_id: string;
  address: string;
  zip: string;
  borough: string;
  cause: string | null;
  reported_at: string;
  first_seen_at: string;
  ended_at?: string;
}

export interface HistoricalPayload {
  page: number;
  page_size: number;
  rows: HistoricalRow[];
}

export interface PerCapitaEntry {
  borough: string;
  count: number;
  per_capita: number;
}

export interface PerCapitaPayload {
  boroughs: PerCapitaEntry[];
}

export interface TrendPayload {
  x: "income" | "nonwhite";
  slope: number;
  intercept: number;
  r: number;
  n: number;
  points: [number, number][];
}

export interface CausesPayload {
  causes: { cause: string; count: number }[];
}

export interface TransitionBinsPayload {
  bin_upper_limits: (number | null)[];
  matrix: number[][];
  pairs: number;
}

export interface ClustersPayload {
  k: number;
  assignment: Record<string, number>;
  centroids: [number, number][];
}

export interface InfluenceEdge {
  from_cluster: number;
  to_cluster: number;
  weight: number;
}

export interface PredictionPayload {
  clusters: ClustersPayload;
  o_now: number[];
  o_predicted: number[];
  top_edges: InfluenceEdge[];
}

export interface ConfigPayload {
  poll_interval_minutes: number;
  step_hours: number;
  clusters: number;
  samples: number;
  seed?: number;
}

export interface ApiError {
  reason: string;
  [extra: string]: unknown;
}
