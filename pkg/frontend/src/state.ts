// View state and the interaction logic behind the explorer: pick a sample
// ("here"), pick a target ("there"), toggle blacklisted features, re-query.
// Everything here is pure apart from ViewController's service calls.

import type { DrcfClient } from "./api.js";
import type { Embedding, ExplanationSet, SessionInfo } from "./types.js";

export interface ViewState {
  sessionId: string;
  kind: SessionInfo["kind"];
  d: number;
  sampleIndex: number | null;
  // [x, y] for continuous projectors, [row, col] grid cell for SOM
  target: number[] | null;
  k: number;
  blacklist: number[];
  lastExplanation: ExplanationSet | null;
  inFlight: boolean;
}

export const K_MIN = 1;
export const K_MAX = 5;

export function initialState(session: SessionInfo): ViewState {
  return {
    sessionId: session.session_id,
    kind: session.kind,
    d: session.d,
    sampleIndex: null,
    target: null,
    k: 3,
    blacklist: [],
    lastExplanation: null,
    inFlight: false,
  };
}

export function selectSample(state: ViewState, index: number): ViewState {
  if (!Number.isInteger(index) || index < 0) {
    throw new RangeError(`invalid sample index ${index}`);
  }
  return { ...state, sampleIndex: index, lastExplanation: null };
}

/** Snap a raw click to the nearest grid cell, clamped to the grid. */
export function snapToGrid(click: [number, number], gridShape: number[]): number[] {
  const clamp = (v: number, hi: number) => Math.min(hi - 1, Math.max(0, Math.round(v)));
  return [clamp(click[0], gridShape[0]), clamp(click[1], gridShape[1])];
}

export function selectTarget(
  state: ViewState,
  click: [number, number],
  embedding: Embedding,
): ViewState {
  const target =
    state.kind === "som" && embedding.grid_shape
      ? snapToGrid(click, embedding.grid_shape)
      : [click[0], click[1]];
  return { ...state, target };
}

/**
 * Flip one feature in the blacklist. Refuses to cover all features: at least
 * one must stay free for the solver to have something to move.
 */
export function toggleBlacklist(state: ViewState, feature: number): ViewState {
  if (!Number.isInteger(feature) || feature < 0 || feature >= state.d) {
    throw new RangeError(`feature ${feature} out of range [0, ${state.d})`);
  }
  const has = state.blacklist.includes(feature);
  if (!has && state.blacklist.length >= state.d - 1) {
    return state; // control is disabled; ignore the toggle
  }
  const blacklist = has
    ? state.blacklist.filter((f) => f !== feature)
    : [...state.blacklist, feature].sort((a, b) => a - b);
  return { ...state, blacklist };
}

export function canBlacklist(state: ViewState, feature: number): boolean {
  return state.blacklist.includes(feature) || state.blacklist.length < state.d - 1;
}

export function setK(state: ViewState, k: number): ViewState {
  if (!Number.isInteger(k) || k < K_MIN || k > K_MAX) {
    throw new RangeError(`k must be an integer in [${K_MIN}, ${K_MAX}]`);
  }
  return { ...state, k };
}

/** Serialize the restorable part of the view into URL hash parameters. */
export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("session", state.sessionId);
  if (state.sampleIndex !== null) params.set("sample", String(state.sampleIndex));
  if (state.target !== null) params.set("target", state.target.join(","));
  params.set("k", String(state.k));
  if (state.blacklist.length > 0) params.set("blacklist", state.blacklist.join(","));
  return params.toString();
}

export function decodeState(session: SessionInfo, encoded: string): ViewState {
  const params = new URLSearchParams(encoded);
  let state = initialState(session);
  const sample = params.get("sample");
  if (sample !== null) state = selectSample(state, Number(sample));
  const target = params.get("target");
  if (target !== null) {
    state = { ...state, target: target.split(",").map(Number) };
  }
  const k = params.get("k");
  if (k !== null) state = setK(state, Number(k));
  const blacklist = params.get("blacklist");
  if (blacklist !== null) {
    for (const f of blacklist.split(",")) state = toggleBlacklist(state, Number(f));
  }
  return state;
}

/**
 * Drives explanation requests with a monotone sequence number so that a
 * response arriving after a newer click is dropped instead of clobbering
 * the fresher view.
 */
export class ViewController {
  private seq = 0;
  state: ViewState;

  constructor(
    private readonly client: DrcfClient,
    session: SessionInfo,
  ) {
    this.state = initialState(session);
  }

  async requestExplanation(): Promise<ViewState> {
    const { sampleIndex, target } = this.state;
    if (sampleIndex === null || target === null) {
      throw new Error("select a sample and a target first");
    }
    const ticket = ++this.seq;
    this.state = { ...this.state, inFlight: true };
    try {
      const es = await this.client.explain(this.state.sessionId, {
        sample_index: sampleIndex,
        y_cf: target,
        k: this.state.k,
        blacklist: this.state.blacklist,
      });
      if (ticket === this.seq) {
        this.state = { ...this.state, lastExplanation: es, inFlight: false };
      }
    } catch (err) {
      if (ticket === this.seq) {
        this.state = { ...this.state, inFlight: false };
      }
      throw err;
    }
    return this.state;
  }
}
