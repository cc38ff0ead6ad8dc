import {
  ServiceError,
  fetchClusters,
  fetchHeatmap,
  fetchQuery,
  fetchStats,
  fetchTopicDetail,
  fetchTopics,
} from "./api.js";
import { formatProbability, groupColor, shadeTextColor, shadeToColor } from "./format.js";
import type {
  ClustersPayload,
  HeatmapPayload,
  QueryPayload,
  StatsPayload,
  TopicDetailPayload,
  TopicsPayload,
} from "./payloads.js";
import {
  allSingletons,
  clusterGroups,
  heatmapGrid,
  probabilityRows,
  queryNotice,
  topicListItems,
} from "./viewmodel.js";
import {
  DEFAULT_VIEW,
  PANELS,
  type Panel,
  type ViewState,
  decodeViewState,
  encodeViewState,
  normalizeLambda,
  sameViewState,
} from "./viewstate.js";

const PANEL_LABELS: Record<Panel, string> = {
  topics: "Topics",
  classes: "Classes & methods",
  traces: "Traces",
  heatmap: "Heat map",
  clusters: "Clusters",
};

const app = document.querySelector<HTMLDivElement>("#app");
if (!app) throw new Error("Missing #app element");

app.innerHTML = `
  <div class="shell">
    <header class="masthead">
      <h1>Trace Topics Explorer</h1>
      <div class="run-facts" id="run-facts">connecting to service...</div>
    </header>

    <div class="banner" id="banner" role="alert"></div>

    <div class="columns">
      <section class="card" aria-label="Feature query and topic list">
        <h2>Feature query</h2>
        <form class="query-form" id="query-form">
          <input
            type="search"
            id="query-input"
            placeholder="describe a feature, e.g. undo the last change"
            aria-label="Feature query"
          />
          <button class="primary" type="submit">Search</button>
          <button type="button" id="query-clear">Clear</button>
        </form>
        <p class="list-note" id="list-note">all topics</p>
        <ul class="topic-list" id="topic-list"></ul>
      </section>

      <section class="card" aria-label="Detail panels">
        <nav class="tabs" id="tabs"></nav>
        <div id="panel-body"></div>
      </section>
    </div>

    <p class="footer-note">
      Every number shown is taken verbatim from the run artifacts served
      under /v1; lists keep the service order. The current view is encoded
      in the URL fragment, so the address bar is always a shareable link.
    </p>
  </div>
`;

const runFactsEl = app.querySelector<HTMLDivElement>("#run-facts")!;
const bannerEl = app.querySelector<HTMLDivElement>("#banner")!;
const queryForm = app.querySelector<HTMLFormElement>("#query-form")!;
const queryInput = app.querySelector<HTMLInputElement>("#query-input")!;
const queryClear = app.querySelector<HTMLButtonElement>("#query-clear")!;
const listNoteEl = app.querySelector<HTMLParagraphElement>("#list-note")!;
const topicListEl = app.querySelector<HTMLUListElement>("#topic-list")!;
const tabsEl = app.querySelector<HTMLElement>("#tabs")!;
const panelBodyEl = app.querySelector<HTMLDivElement>("#panel-body")!;

let state: ViewState = { ...DEFAULT_VIEW };

// Last served payloads; rendering always reads from these.
let topicsPayload: TopicsPayload | null = null;
let searchPayload: QueryPayload | null = null;
let detailPayload: TopicDetailPayload | null = null;
let heatmapPayload: HeatmapPayload | null = null;
let clustersPayload: ClustersPayload | null = null;
let statsPayload: StatsPayload | null = null;

// Monotonic ids give each panel last-write-wins over in-flight fetches.
let listRequestId = 0;
let detailRequestId = 0;
let heatmapRequestId = 0;
let clustersRequestId = 0;

function showBanner(message: string) {
  bannerEl.textContent = message;
  bannerEl.classList.add("is-visible");
}

function clearBanner() {
  bannerEl.textContent = "";
  bannerEl.classList.remove("is-visible");
}

function describeError(err: unknown): string {
  if (err instanceof ServiceError) return `${err.code}: ${err.message}`;
  return String(err);
}

function writeHash() {
  const encoded = encodeViewState(state);
  const next = encoded === "" ? location.pathname + location.search : `#${encoded}`;
  history.replaceState(null, "", next);
}

function setState(patch: Partial<ViewState>) {
  state = { ...state, ...patch };
  writeHash();
}

// ---------------------------------------------------------------------
// Topic list (left column)
// ---------------------------------------------------------------------

function renderTopicList() {
  const items =
    state.query === ""
      ? topicListItems(topicsPayload ? topicsPayload.topics : [])
      : topicListItems(searchPayload ? searchPayload.topics : []);

  if (state.query === "") {
    listNoteEl.textContent = topicsPayload
      ? `all ${topicsPayload.num_topics} topics`
      : "loading topics...";
  } else if (searchPayload) {
    const note = queryNotice(searchPayload);
    listNoteEl.textContent =
      note ?? `matched terms: ${searchPayload.terms.join(", ")}`;
  } else {
    listNoteEl.textContent = "searching...";
  }

  topicListEl.textContent = "";
  const fragment = document.createDocumentFragment();
  items.forEach((item) => {
    const li = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.className = "topic-item";
    if (item.topic === state.topic) button.classList.add("is-selected");
    button.dataset.topic = String(item.topic);

    const id = document.createElement("span");
    id.className = "topic-id";
    id.textContent = `topic ${item.topic}`;
    const words = document.createElement("span");
    words.className = "topic-words";
    words.textContent = item.words;
    button.append(id, words);
    if (item.score !== "") {
      const score = document.createElement("span");
      score.className = "topic-score";
      score.textContent = item.score;
      button.append(score);
    }
    li.appendChild(button);
    fragment.appendChild(li);
  });
  topicListEl.appendChild(fragment);
}

async function loadTopicList() {
  const requestId = ++listRequestId;
  try {
    if (state.query === "") {
      const payload = await fetchTopics();
      if (requestId !== listRequestId) return;
      topicsPayload = payload;
      searchPayload = null;
    } else {
      const payload = await fetchQuery(state.query);
      if (requestId !== listRequestId) return;
      searchPayload = payload;
    }
    clearBanner();
    renderTopicList();
  } catch (err) {
    if (requestId !== listRequestId) return;
    showBanner(describeError(err));
  }
}

// ---------------------------------------------------------------------
// Right-hand panels
// ---------------------------------------------------------------------

function renderTabs() {
  tabsEl.textContent = "";
  PANELS.forEach((panel) => {
    const button = document.createElement("button");
    button.type = "button";
    button.dataset.panel = panel;
    button.textContent = PANEL_LABELS[panel];
    button.setAttribute("aria-pressed", panel === state.panel ? "true" : "false");
    tabsEl.appendChild(button);
  });
}

function placeholder(text: string): HTMLParagraphElement {
  const p = document.createElement("p");
  p.className = "placeholder";
  p.textContent = text;
  return p;
}

function sectionLabel(text: string): HTMLParagraphElement {
  const p = document.createElement("p");
  p.className = "section-label";
  p.textContent = text;
  return p;
}

function probabilityTable(
  pairs: ReadonlyArray<readonly [string, number]>,
  header: string
): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "prob-table";
  const head = table.createTHead().insertRow();
  for (const caption of [header, "probability", ""]) {
    const th = document.createElement("th");
    th.textContent = caption;
    head.appendChild(th);
  }
  const body = table.createTBody();
  probabilityRows(pairs).forEach((row) => {
    const tr = body.insertRow();
    tr.insertCell().textContent = row.label;
    const amount = tr.insertCell();
    amount.className = "num";
    amount.textContent = row.amount;
    const barCell = tr.insertCell();
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${row.value * 100}%`;
    track.appendChild(fill);
    barCell.appendChild(track);
  });
  return table;
}

function renderClassesPanel() {
  panelBodyEl.textContent = "";
  if (state.topic === null) {
    panelBodyEl.appendChild(placeholder("Pick a topic from the list to see its classes and methods."));
    return;
  }
  if (!detailPayload || detailPayload.topic !== state.topic) {
    panelBodyEl.appendChild(placeholder(`Loading topic ${state.topic}...`));
    return;
  }
  panelBodyEl.appendChild(sectionLabel(`topic ${detailPayload.topic} top words`));
  const words = document.createElement("p");
  words.textContent = detailPayload.top_words.map(([w]) => w).join(" ");
  panelBodyEl.appendChild(words);
  panelBodyEl.appendChild(sectionLabel("classes"));
  panelBodyEl.appendChild(probabilityTable(detailPayload.classes, "class"));
  panelBodyEl.appendChild(sectionLabel("methods"));
  panelBodyEl.appendChild(probabilityTable(detailPayload.methods, "method"));
}

function renderTracesPanel() {
  panelBodyEl.textContent = "";
  if (state.topic === null) {
    panelBodyEl.appendChild(placeholder("Pick a topic to list the traces it draws from."));
    return;
  }
  if (!detailPayload || detailPayload.topic !== state.topic) {
    panelBodyEl.appendChild(placeholder(`Loading topic ${state.topic}...`));
    return;
  }
  panelBodyEl.appendChild(
    sectionLabel(`traces related to topic ${detailPayload.topic}`)
  );
  if (detailPayload.traces.length === 0) {
    panelBodyEl.appendChild(placeholder("No traces recorded for this topic."));
    return;
  }
  const list = document.createElement("ul");
  list.className = "chips";
  detailPayload.traces.forEach((traceId) => {
    const li = document.createElement("li");
    li.className = "chip";
    li.textContent = traceId;
    list.appendChild(li);
  });
  panelBodyEl.appendChild(list);
}

function renderHeatmapPanel() {
  panelBodyEl.textContent = "";
  if (!heatmapPayload) {
    panelBodyEl.appendChild(placeholder("Loading heat map..."));
    return;
  }
  panelBodyEl.appendChild(sectionLabel("class-topic weights, darker is heavier"));
  const scroll = document.createElement("div");
  scroll.className = "heatmap-scroll";
  const table = document.createElement("table");
  table.className = "heatmap";
  const head = table.createTHead().insertRow();
  head.appendChild(document.createElement("th"));
  heatmapPayload.topics.forEach((topic) => {
    const th = document.createElement("th");
    th.textContent = `topic ${topic}`;
    head.appendChild(th);
  });
  const body = table.createTBody();
  heatmapGrid(heatmapPayload).forEach((row) => {
    const tr = body.insertRow();
    const name = document.createElement("th");
    name.textContent = row.className;
    tr.appendChild(name);
    row.cells.forEach((cell) => {
      const td = tr.insertCell();
      td.className = "cell";
      if (cell) {
        td.style.background = shadeToColor(cell.shade);
        td.style.color = shadeTextColor(cell.shade);
        td.textContent = formatProbability(cell.weight);
        td.title = `${cell.class} / topic ${cell.topic}: ${formatProbability(cell.weight)}`;
      } else {
        td.textContent = "-";
      }
    });
  });
  scroll.appendChild(table);
  panelBodyEl.appendChild(scroll);
}

function renderClustersPanel() {
  panelBodyEl.textContent = "";

  const row = document.createElement("div");
  row.className = "lambda-row";
  const label = document.createElement("span");
  label.textContent = "lambda";
  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = "1";
  slider.step = "0.001";
  slider.id = "lambda-slider";
  const shown =
    state.lambda !== null
      ? state.lambda
      : clustersPayload
        ? clustersPayload.lambda
        : 0.5;
  slider.value = String(shown);
  const valueEl = document.createElement("span");
  valueEl.className = "lambda-value";
  valueEl.textContent = clustersPayload
    ? clustersPayload.lambda.toFixed(3)
    : shown.toFixed(3);
  row.append(label, slider, valueEl);
  panelBodyEl.appendChild(row);

  slider.addEventListener("input", () => {
    const lambda = normalizeLambda(slider.value);
    setState({ lambda });
    void loadClusters();
  });

  if (!clustersPayload) {
    panelBodyEl.appendChild(placeholder("Loading clusters..."));
    return;
  }
  const groups = clusterGroups(clustersPayload);
  const note = document.createElement("p");
  note.className = "list-note";
  note.textContent = allSingletons(groups)
    ? `${groups.length} groups, all singletons`
    : `${groups.length} group(s) at lambda ${clustersPayload.lambda.toFixed(3)}`;
  panelBodyEl.appendChild(note);

  const list = document.createElement("ul");
  list.className = "cluster-list";
  groups.forEach((group) => {
    const li = document.createElement("li");
    li.className = "cluster-group";
    li.style.borderLeftColor = groupColor(group.index);
    const title = document.createElement("div");
    title.className = "group-title";
    title.textContent = `group ${group.index}`;
    const chips = document.createElement("ul");
    chips.className = "chips";
    group.members.forEach((member) => {
      const chip = document.createElement("li");
      chip.className = "chip";
      chip.textContent = member;
      chips.appendChild(chip);
    });
    li.append(title, chips);
    list.appendChild(li);
  });
  panelBodyEl.appendChild(list);
}

function renderPanelBody() {
  switch (state.panel) {
    case "topics":
      panelBodyEl.textContent = "";
      panelBodyEl.appendChild(
        placeholder(
          state.topic === null
            ? "Search for a feature on the left, then click a topic."
            : "Switch to a tab above to inspect the selected topic."
        )
      );
      break;
    case "classes":
      renderClassesPanel();
      break;
    case "traces":
      renderTracesPanel();
      break;
    case "heatmap":
      renderHeatmapPanel();
      break;
    case "clusters":
      renderClustersPanel();
      break;
  }
}

function renderRight() {
  renderTabs();
  renderPanelBody();
}

// ---------------------------------------------------------------------
// Panel data loading
// ---------------------------------------------------------------------

async function loadDetail() {
  if (state.topic === null) return;
  const topic = state.topic;
  const requestId = ++detailRequestId;
  try {
    const payload = await fetchTopicDetail(topic);
    if (requestId !== detailRequestId) return;
    detailPayload = payload;
    clearBanner();
    renderRight();
  } catch (err) {
    if (requestId !== detailRequestId) return;
    showBanner(describeError(err));
    if (err instanceof ServiceError && err.status === 404) {
      // stale link; fall back to the topic list
      setState({ topic: null, panel: "topics" });
      renderTopicList();
      renderRight();
    }
  }
}

async function loadHeatmap() {
  if (heatmapPayload) return;
  const requestId = ++heatmapRequestId;
  try {
    const payload = await fetchHeatmap();
    if (requestId !== heatmapRequestId) return;
    heatmapPayload = payload;
    if (state.panel === "heatmap") renderPanelBody();
  } catch (err) {
    if (requestId !== heatmapRequestId) return;
    showBanner(describeError(err));
  }
}

async function loadClusters() {
  const requestId = ++clustersRequestId;
  try {
    const payload = await fetchClusters(state.lambda);
    if (requestId !== clustersRequestId) return;
    clustersPayload = payload;
    if (state.panel === "clusters") renderPanelBody();
  } catch (err) {
    if (requestId !== clustersRequestId) return;
    showBanner(describeError(err));
  }
}

function loadActivePanel() {
  if (state.panel === "heatmap") void loadHeatmap();
  if (state.panel === "clusters") void loadClusters();
  if ((state.panel === "classes" || state.panel === "traces") && state.topic !== null) {
    if (!detailPayload || detailPayload.topic !== state.topic) void loadDetail();
  }
}

// ---------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------

queryForm.addEventListener("submit", (event) => {
  event.preventDefault();
  setState({ query: queryInput.value.trim() });
  renderTopicList();
  void loadTopicList();
});

queryClear.addEventListener("click", () => {
  queryInput.value = "";
  setState({ query: "" });
  renderTopicList();
  void loadTopicList();
});

topicListEl.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLButtonElement>(".topic-item");
  if (!target || target.dataset.topic === undefined) return;
  const topic = Number.parseInt(target.dataset.topic, 10);
  const panel: Panel = state.panel === "topics" ? "classes" : state.panel;
  setState({ topic, panel });
  renderTopicList();
  renderRight();
  void loadDetail();
});

tabsEl.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLButtonElement>("button");
  if (!target || target.dataset.panel === undefined) return;
  const panel = target.dataset.panel as Panel;
  setState({ panel });
  renderRight();
  loadActivePanel();
});

window.addEventListener("hashchange", () => {
  const next = decodeViewState(location.hash);
  if (sameViewState(state, next)) return;
  state = next;
  queryInput.value = state.query;
  detailPayload = null;
  renderTopicList();
  renderRight();
  void loadTopicList();
  loadActivePanel();
});

// ---------------------------------------------------------------------
// Boot
// ---------------------------------------------------------------------

async function boot() {
  state = decodeViewState(location.hash);
  queryInput.value = state.query;
  renderTopicList();
  renderRight();

  try {
    statsPayload = await fetchStats();
    const s = statsPayload;
    runFactsEl.textContent =
      `${s.num_docs} traces, ${s.num_topics} topics, ${s.vocab_size} terms, ` +
      `seed ${s.seed}, run ${s.status}, v${s.tool_version}`;
  } catch (err) {
    runFactsEl.textContent = "service not reachable";
    showBanner(describeError(err));
  }

  void loadTopicList();
  if (state.topic !== null) void loadDetail();
  loadActivePanel();
}

void boot();
