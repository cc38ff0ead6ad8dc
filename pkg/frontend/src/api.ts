// Thin typed fetch layer over the /v1 endpoints. All calls are GETs and
// idempotent; errors carry the service's structured code and message.

import type {
  CategoriesPayload,
  ClustersPayload,
  ErrorPayload,
  HeatmapPayload,
  QueryPayload,
  StatsPayload,
  TopicDetailPayload,
  TopicsPayload,
} from "./payloads.js";

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ServiceError";
    this.status = status;
    this.code = code;
  }
}

async function getJson<T>(path: string): Promise<T> {
  let response: Response;
  try {
    response = await fetch(path, { headers: { Accept: "application/json" } });
  } catch (err) {
    throw new ServiceError(0, "unreachable", `service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    let code = "http_error";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = (await response.json()) as ErrorPayload;
      if (body && body.error) {
        code = body.error.code;
        message = body.error.message;
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ServiceError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export function fetchTopics(): Promise<TopicsPayload> {
  return getJson("/v1/topics");
}

export function fetchQuery(text: string): Promise<QueryPayload> {
  return getJson(`/v1/query?q=${encodeURIComponent(text)}`);
}

export function fetchTopicDetail(topic: number): Promise<TopicDetailPayload> {
  return getJson(`/v1/topics/${topic}/detail`);
}

export function fetchHeatmap(): Promise<HeatmapPayload> {
  return getJson("/v1/heatmap");
}

export function fetchCategories(): Promise<CategoriesPayload> {
  return getJson("/v1/categories");
}

export function fetchClusters(lambda: number | null): Promise<ClustersPayload> {
  if (lambda === null) return getJson("/v1/clusters");
  return getJson(`/v1/clusters?lambda=${encodeURIComponent(String(lambda))}`);
}

export function fetchStats(): Promise<StatsPayload> {
  return getJson("/v1/stats");
}
