// View state is the whole client-side persistence story: it round-trips
// through the URL fragment so any view is a shareable link.

import { clamp01 } from "./format.js";

export const PANELS = ["topics", "classes", "traces", "heatmap", "clusters"] as const;

export type Panel = (typeof PANELS)[number];

export interface ViewState {
  /** Current feature query text; empty means "browse all topics". */
  query: string;
  /** Selected topic id, or null when nothing is selected. */
  topic: number | null;
  /** Lambda slider value in [0, 1]; null defers to the server default. */
  lambda: number | null;
  /** Which panel is active. */
  panel: Panel;
}

export const DEFAULT_VIEW: ViewState = {
  query: "",
  topic: null,
  lambda: null,
  panel: "topics",
};

export function isPanel(value: string): value is Panel {
  return (PANELS as readonly string[]).includes(value);
}

/**
 * Clamp a raw slider or URL value into the valid lambda range.
 * Non-numeric input falls back to null (server default).
 */
export function normalizeLambda(raw: string | number | null): number | null {
  if (raw === null || raw === "") return null;
  const value = typeof raw === "number" ? raw : Number.parseFloat(raw);
  if (Number.isNaN(value)) return null;
  return clamp01(value);
}

/** Encode a view state as a URL fragment body (no leading "#"). */
export function encodeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.query !== "") params.set("q", state.query);
  if (state.topic !== null) params.set("topic", String(state.topic));
  if (state.lambda !== null) params.set("lambda", String(state.lambda));
  if (state.panel !== DEFAULT_VIEW.panel) params.set("panel", state.panel);
  return params.toString();
}

/** Decode a URL fragment (with or without "#") back into a view state. */
export function decodeViewState(fragment: string): ViewState {
  const body = fragment.startsWith("#") ? fragment.slice(1) : fragment;
  const params = new URLSearchParams(body);

  const query = params.get("q") ?? "";

  let topic: number | null = null;
  const rawTopic = params.get("topic");
  if (rawTopic !== null && /^\d+$/.test(rawTopic)) {
    topic = Number.parseInt(rawTopic, 10);
  }

  const lambda = normalizeLambda(params.get("lambda"));

  const rawPanel = params.get("panel") ?? DEFAULT_VIEW.panel;
  const panel = isPanel(rawPanel) ? rawPanel : DEFAULT_VIEW.panel;

  return { query, topic, lambda, panel };
}

export function sameViewState(a: ViewState, b: ViewState): boolean {
  return (
    a.query === b.query &&
    a.topic === b.topic &&
    a.lambda === b.lambda &&
    a.panel === b.panel
  );
}
