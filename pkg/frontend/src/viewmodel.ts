// Pure payload-to-view mappings. Every list keeps the exact order the
// service returned; nothing here re-sorts, filters, or recomputes model
// numbers. Keeping these functions DOM-free makes them directly testable.

import { formatProbability } from "./format.js";
import type {
  ClustersPayload,
  HeatmapCell,
  HeatmapPayload,
  NameWeight,
  QueryPayload,
  TopicSummary,
  WordProb,
} from "./payloads.js";

export interface ProbabilityRow {
  label: string;
  /** Six-decimal rendering of the served value. */
  amount: string;
  /** Raw served value, used only for bar widths. */
  value: number;
}

/** Map [name, value] pairs to display rows, preserving payload order. */
export function probabilityRows(pairs: ReadonlyArray<NameWeight>): ProbabilityRow[] {
  return pairs.map(([label, value]) => ({
    label,
    amount: formatProbability(value),
    value,
  }));
}

/** Join a topic's top words into a single label, payload order intact. */
export function topWordsLabel(words: ReadonlyArray<WordProb>): string {
  return words.map(([word]) => word).join(" ");
}

export interface TopicListItem {
  topic: number;
  words: string;
  /** Six-decimal query score; empty string when listing without a query. */
  score: string;
}

/** Items for the topic list panel, in served order (no client re-sorting). */
export function topicListItems(
  topics: ReadonlyArray<TopicSummary & { score?: number }>
): TopicListItem[] {
  return topics.map((entry) => ({
    topic: entry.topic,
    words: topWordsLabel(entry.top_words),
    score: entry.score === undefined ? "" : formatProbability(entry.score),
  }));
}

/** The notice line for a query result, or null when topics rendered. */
export function queryNotice(payload: QueryPayload): string | null {
  if (payload.topics.length > 0) return null;
  return payload.notice ?? "no topics";
}

export interface ClusterGroup {
  index: number;
  members: string[];
}

/** Cluster groups in served order; singleton detection for the UI badge. */
export function clusterGroups(payload: ClustersPayload): ClusterGroup[] {
  return payload.clusters.map((members, index) => ({ index, members: [...members] }));
}

export function allSingletons(groups: ReadonlyArray<ClusterGroup>): boolean {
  return groups.length > 0 && groups.every((g) => g.members.length === 1);
}

export interface HeatmapGridRow {
  className: string;
  cells: (HeatmapCell | null)[];
}

/**
 * Arrange flat heatmap cells into one row per class. Row order follows
 * first appearance in the payload; column order follows payload.topics.
 */
export function heatmapGrid(payload: HeatmapPayload): HeatmapGridRow[] {
  const rowIndex = new Map<string, HeatmapGridRow>();
  const rows: HeatmapGridRow[] = [];
  const columnOf = new Map<number, number>();
  payload.topics.forEach((topic, i) => columnOf.set(topic, i));

  for (const cell of payload.cells) {
    let row = rowIndex.get(cell.class);
    if (!row) {
      row = { className: cell.class, cells: payload.topics.map(() => null) };
      rowIndex.set(cell.class, row);
      rows.push(row);
    }
    const column = columnOf.get(cell.topic);
    if (column !== undefined) row.cells[column] = cell;
  }
  return rows;
}
