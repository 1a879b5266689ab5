// Wire types for the drcf HTTP/JSON API (api_version 1.0).

export type ProjectorKind = "linear" | "som" | "ae" | "ptsne";

export interface SessionInfo {
  session_id: string;
  kind: ProjectorKind;
  d: number;
  d_out: number;
  n_samples: number;
  feature_names: string[];
}

export interface SessionList {
  api_version: string;
  sessions: SessionInfo[];
}

export interface Embedding {
  api_version: string;
  kind: ProjectorKind;
  // [x, y] per sample; for SOM these are integer grid cells [row, col]
  points: number[][];
  labels: number[];
  feature_names: string[];
  grid_shape?: number[];
}

export interface CounterfactualMember {
  x_cf: number[];
  delta: number[];
  y_achieved: number[];
  map_error: number;
  changed_features: number[];
}

export interface ExplanationSet {
  api_version?: string;
  y_cf: number[];
  blacklist: number[];
  C: number;
  members: CounterfactualMember[];
  pairwise_div: number[][];
  shortfall: boolean;
}

export interface Attribution {
  api_version: string;
  weights: number[];
  feature_names: string[];
  n_failed: number;
  uniform_fallback: boolean;
}

export interface ApiError {
  code: string;
  message: string;
  detail: string;
}

export interface ExplainRequest {
  sample_index?: number;
  x?: number[];
  y_cf: number[];
  k?: number;
  blacklist?: number[];
  C?: number;
}

export interface AttributionRequest {
  sample_index: number;
  targets: number[][];
  C?: number;
}
