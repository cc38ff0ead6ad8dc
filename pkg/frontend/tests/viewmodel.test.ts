import { describe, expect, it } from "vitest";

import { formatProbability } from "../src/format.js";
import type {
  ClustersPayload,
  HeatmapPayload,
  QueryPayload,
  TopicDetailPayload,
} from "../src/payloads.js";
import {
  allSingletons,
  clusterGroups,
  heatmapGrid,
  probabilityRows,
  queryNotice,
  topWordsLabel,
  topicListItems,
} from "../src/viewmodel.js";

import clustersLambda0 from "./fixtures/clusters_lambda0.json";
import clustersLambda1 from "./fixtures/clusters_lambda1.json";
import heatmapFixture from "./fixtures/heatmap.json";
import queryUndo from "./fixtures/query_undo.json";
import topicDetail from "./fixtures/topic1_detail.json";

const undoPayload = queryUndo as unknown as QueryPayload;
const detailPayload = topicDetail as unknown as TopicDetailPayload;
const oneGroupPayload = clustersLambda0 as unknown as ClustersPayload;
const singletonsPayload = clustersLambda1 as unknown as ClustersPayload;
const heatmapPayload = heatmapFixture as unknown as HeatmapPayload;

describe("probabilityRows", () => {
  it("preserves the payload order even when it is not sorted", () => {
    const rows = probabilityRows([
      ["beta", 0.1],
      ["alpha", 0.9],
      ["gamma", 0.5],
    ]);
    expect(rows.map((r) => r.label)).toEqual(["beta", "alpha", "gamma"]);
    expect(rows.map((r) => r.amount)).toEqual(["0.100000", "0.900000", "0.500000"]);
  });

  it("keeps the raw value alongside the formatted amount", () => {
    const [row] = probabilityRows([["x", 0.9546713943679649]]);
    expect(row.value).toBe(0.9546713943679649);
    expect(row.amount).toBe("0.954671");
  });
});

describe("topic list items", () => {
  it("keeps served order and joins top words", () => {
    const items = topicListItems([
      { topic: 4, top_words: [["zeta", 0.3], ["eta", 0.2]], score: 0.25 },
      { topic: 0, top_words: [["alpha", 0.9]], score: 0.75 },
    ]);
    expect(items.map((i) => i.topic)).toEqual([4, 0]);
    expect(items[0].words).toBe("zeta eta");
    expect(items[0].score).toBe("0.250000");
  });

  it("renders an empty score when listing without a query", () => {
    const items = topicListItems([{ topic: 1, top_words: [["undo", 0.1]] }]);
    expect(items[0].score).toBe("");
  });
});

describe("queryNotice", () => {
  it("is silent while topics are present", () => {
    expect(queryNotice(undoPayload)).toBeNull();
  });

  it("surfaces the service notice for zero-hit queries", () => {
    const empty: QueryPayload = {
      query: "zzz",
      terms: [],
      topics: [],
      notice: "no query terms matched the vocabulary",
    };
    expect(queryNotice(empty)).toBe("no query terms matched the vocabulary");
  });

  it("falls back to a plain placeholder when the notice is null", () => {
    const empty: QueryPayload = { query: "zzz", terms: ["zzz"], topics: [], notice: null };
    expect(queryNotice(empty)).toBe("no topics");
  });
});

describe("heatmapGrid", () => {
  it("builds one row per class with columns following the topic order", () => {
    const grid = heatmapGrid(heatmapPayload);
    const classes = new Set(heatmapPayload.cells.map((c) => c.class));
    expect(grid.length).toBe(classes.size);
    for (const row of grid) {
      expect(row.cells.length).toBe(heatmapPayload.topics.length);
      row.cells.forEach((cell, column) => {
        if (cell) {
          expect(cell.class).toBe(row.className);
          expect(cell.topic).toBe(heatmapPayload.topics[column]);
        }
      });
    }
  });

  it("orders rows by first appearance in the payload", () => {
    const grid = heatmapGrid(heatmapPayload);
    const firstSeen: string[] = [];
    for (const cell of heatmapPayload.cells) {
      if (!firstSeen.includes(cell.class)) firstSeen.push(cell.class);
    }
    expect(grid.map((r) => r.className)).toEqual(firstSeen);
  });

  it("leaves holes as nulls", () => {
    const sparse: HeatmapPayload = {
      normalization: "global_max",
      formula: "",
      topics: [0, 1],
      cells: [{ class: "Only", topic: 1, weight: 0.5, shade: 1 }],
    };
    const grid = heatmapGrid(sparse);
    expect(grid[0].cells[0]).toBeNull();
    expect(grid[0].cells[1]?.weight).toBe(0.5);
  });
});

describe("query round-trip against captured service payloads", () => {
  it("lists the undo topic first for the undo query", () => {
    const items = topicListItems(undoPayload.topics);
    expect(items.length).toBeGreaterThan(0);
    expect(items[0].topic).toBe(1);
    expect(items[0].words.split(" ")).toContain("undo");
    expect(items[0].score).toMatch(/^\d\.\d{6}$/);
  });

  it("keeps the served ranking without re-sorting", () => {
    const items = topicListItems(undoPayload.topics);
    expect(items.map((i) => i.topic)).toEqual(undoPayload.topics.map((t) => t.topic));
  });

  it("renders the topic's classes in exact payload order with six decimals", () => {
    expect(detailPayload.topic).toBe(1);
    const rows = probabilityRows(detailPayload.classes);
    expect(rows.map((r) => r.label)).toEqual(detailPayload.classes.map(([name]) => name));
    rows.forEach((row, i) => {
      expect(row.amount).toBe(formatProbability(detailPayload.classes[i][1]));
      expect(row.amount).toMatch(/^\d\.\d{6}$/);
    });
    expect(rows.map((r) => r.label).slice(0, 2)).toEqual(["UndoManager", "CommandHistory"]);
  });

  it("shows its top words with the undo vocabulary present", () => {
    expect(topWordsLabel(detailPayload.top_words).split(" ")).toContain("undo");
  });

  it("collapses to a single group at lambda 0", () => {
    expect(oneGroupPayload.lambda).toBe(0);
    const groups = clusterGroups(oneGroupPayload);
    expect(groups.length).toBe(1);
    expect(groups[0].members.length).toBe(6);
  });

  it("splits every class into its own group at lambda 1", () => {
    expect(singletonsPayload.lambda).toBe(1);
    const groups = clusterGroups(singletonsPayload);
    expect(groups.length).toBe(6);
    expect(allSingletons(groups)).toBe(true);
  });
});
