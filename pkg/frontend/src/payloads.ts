// Wire types for the /v1 endpoints. Field names mirror the JSON exactly.

export type WordProb = readonly [string, number];
export type NameWeight = readonly [string, number];

export interface TopicSummary {
  topic: number;
  top_words: WordProb[];
}

export interface TopicsPayload {
  num_topics: number;
  topics: TopicSummary[];
}

export interface QueryTopic extends TopicSummary {
  score: number;
}

export interface QueryPayload {
  query: string;
  terms: string[];
  topics: QueryTopic[];
  notice: string | null;
}

export interface TopicDetailPayload {
  topic: number;
  top_words: WordProb[];
  classes: NameWeight[];
  methods: NameWeight[];
  traces: string[];
}

export interface HeatmapCell {
  class: string;
  topic: number;
  weight: number;
  shade: number;
}

export interface HeatmapPayload {
  normalization: string;
  formula: string;
  topics: number[];
  cells: HeatmapCell[];
}

export interface CategoryEntry {
  id: string;
  topics: number[];
}

export interface CategoriesPayload {
  threshold: number;
  categories: CategoryEntry[];
  rest: number[];
  membership: Record<string, string[]>;
}

export interface ClustersPayload {
  lambda: number;
  clusters: string[][];
}

export interface UseCaseStatsRow {
  use_case: string;
  scenarios: number;
  methods: number;
  distinct_methods: number;
  methods_after_filter: number | null;
}

export interface StatsPayload {
  use_cases: UseCaseStatsRow[];
  num_docs: number;
  num_topics: number;
  vocab_size: number;
  seed: number;
  tool_version: string;
  status: string;
}

export interface ErrorPayload {
  error: { code: string; message: string };
}
