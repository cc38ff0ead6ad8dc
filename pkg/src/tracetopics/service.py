"""Read-only HTTP service over a completed run directory.

Every response is computed from the persisted artifacts loaded at
startup; nothing is mutated, so restarting the service and replaying
requests yields identical payloads. The lambda cut is recomputed per
request from the cached closure matrix so clients can slide lambda
interactively.
"""

from __future__ import annotations

import json
import logging
import mimetypes
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping
from urllib.parse import parse_qs, urlparse

import numpy as np

from . import __version__
from .analysis import clusters_payload, heatmap_payload, lambda_cut
from .errors import AnalysisError, ArtifactError, QueryError
from .pipeline import (
    A_ANALYSIS_JSON,
    A_CORPUS_STATS,
    RunManifest,
    load_closure,
    load_ctm,
    load_index,
    load_model,
    verify_run_dir,
)
from .query import QueryIndex, drill_down, run_query

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ServiceState:
    """Immutable artifact snapshot the handlers read from."""

    run_dir: Path
    manifest: RunManifest
    index: QueryIndex
    topics_payload: dict
    heatmap: dict
    heatmap_per_row: dict
    categories: dict
    closure_names: tuple[str, ...]
    closure: np.ndarray
    default_lambda: float
    stats: dict
    ui_dir: Path | None


def _parse_stats(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split("\t")
    rows = []
    for line in lines[1:]:
        row = dict(zip(header, line.split("\t")))
        for key in ("scenarios", "methods", "distinct_methods"):
            row[key] = int(row[key])
        after = row.get("methods_after_filter", "")
        row["methods_after_filter"] = int(after) if after else None
        rows.append(row)
    return rows


def load_state(run_dir: str | Path, ui_dir: str | Path | None = None) -> ServiceState:
    """Load and cross-check artifacts; raises ArtifactError when stale."""
    run_dir = Path(run_dir)
    manifest = verify_run_dir(run_dir)
    index = load_index(run_dir)
    model = load_model(run_dir)
    ctm = load_ctm(run_dir)
    closure_names, closure = load_closure(run_dir)
    if closure_names != ctm.class_names:
        raise ArtifactError("closure and class-topic matrix rows disagree")
    if index.num_topics != model.num_topics:
        raise ArtifactError("index and model topic counts disagree")
    analysis = json.loads(
        (run_dir / A_ANALYSIS_JSON).read_text(encoding="utf-8")
    )
    topics_payload = {
        "num_topics": index.num_topics,
        "topics": [
            {"topic": k, "top_words": [[t, w] for t, w in words]}
            for k, words in enumerate(index.topic_top_words)
        ],
    }
    stats = {
        "use_cases": _parse_stats(
            (run_dir / A_CORPUS_STATS).read_text(encoding="utf-8")
        ),
        "num_docs": len(model.doc_ids),
        "num_topics": model.num_topics,
        "vocab_size": model.vocab_size,
        "seed": manifest.seed,
        "tool_version": manifest.version,
        "status": manifest.status,
    }
    cfg = manifest.config or {}
    return ServiceState(
        run_dir=run_dir,
        manifest=manifest,
        index=index,
        topics_payload=topics_payload,
        heatmap=heatmap_payload(ctm, per_row=False),
        heatmap_per_row=heatmap_payload(ctm, per_row=True),
        categories=analysis["categories"],
        closure_names=closure_names,
        closure=closure,
        default_lambda=float(cfg.get("cut_lambda", 0.912)),
        stats=stats,
        ui_dir=Path(ui_dir) if ui_dir is not None else None,
    )


_LANDING = {
    "service": "tracetopics",
    "endpoints": [
        "/v1/topics",
        "/v1/query?q=",
        "/v1/topics/{id}/detail",
        "/v1/heatmap",
        "/v1/categories",
        "/v1/clusters?lambda=",
        "/v1/stats",
    ],
}


class _Handler(BaseHTTPRequestHandler):
    state: ServiceState  # injected by make_server

    server_version = f"tracetopics/{__version__}"

    def log_message(self, fmt, *args):
        log.debug("%s - %s", self.address_string(), fmt % args)

    def _send_json(self, payload: Mapping, status: int = 200) -> None:
        body = (json.dumps(payload, sort_keys=True) + "\n").encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, code: str, message: str) -> None:
        self._send_json({"error": {"code": code, "message": message}}, status)

    def do_POST(self):
        self._send_error_json(405, "method_not_allowed", "service is read-only")

    do_PUT = do_DELETE = do_PATCH = do_POST

    def do_GET(self):
        try:
            self._route()
        except BrokenPipeError:
            pass
        except Exception:
            log.exception("unhandled error for %s", self.path)
            self._send_error_json(500, "internal", "unhandled server error")

    def _route(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        qs = parse_qs(url.query)
        if parts[:1] == ["v1"]:
            self._route_api(parts[1:], qs)
        else:
            self._serve_static(url.path)

    def _route_api(self, parts: list[str], qs: Mapping) -> None:
        state = self.state
        if parts == ["topics"]:
            self._send_json(state.topics_payload)
        elif parts == ["query"]:
            q = qs.get("q", [""])[0]
            try:
                result = run_query(q, state.index)
            except QueryError as exc:
                self._send_error_json(400, "bad_query", str(exc))
                return
            self._send_json(result.to_payload())
        elif len(parts) == 3 and parts[0] == "topics" and parts[2] == "detail":
            try:
                topic_id = int(parts[1])
            except ValueError:
                self._send_error_json(400, "bad_topic", f"not a topic id: {parts[1]!r}")
                return
            try:
                dd = drill_down(topic_id, state.index)
            except QueryError as exc:
                self._send_error_json(404, "topic_not_found", str(exc))
                return
            self._send_json(dd.to_payload())
        elif parts == ["heatmap"]:
            per_row = qs.get("per_row", ["false"])[0].lower() in ("true", "1", "yes")
            self._send_json(state.heatmap_per_row if per_row else state.heatmap)
        elif parts == ["categories"]:
            self._send_json(state.categories)
        elif parts == ["clusters"]:
            raw = qs.get("lambda", [None])[0]
            try:
                cut = state.default_lambda if raw is None else float(raw)
            except ValueError:
                self._send_error_json(400, "bad_lambda", f"not a number: {raw!r}")
                return
            try:
                part = lambda_cut(state.closure, state.closure_names, cut)
            except AnalysisError as exc:
                self._send_error_json(400, "bad_lambda", str(exc))
                return
            self._send_json(clusters_payload(part))
        elif parts == ["stats"]:
            self._send_json(state.stats)
        else:
            self._send_error_json(404, "not_found", "unknown endpoint")

    def _serve_static(self, path: str) -> None:
        state = self.state
        if state.ui_dir is None:
            if path in ("/", "/index.html"):
                self._send_json(_LANDING)
            else:
                self._send_error_json(404, "not_found", "no UI bundle configured")
            return
        rel = path.lstrip("/") or "index.html"
        root = state.ui_dir.resolve()
        target = (root / rel).resolve()
        if root not in target.parents and target != root:
            self._send_error_json(404, "not_found", "outside UI root")
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._send_error_json(404, "not_found", f"no such file {rel}")
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(
    state: ServiceState, host: str = "127.0.0.1", port: int = 8765
) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)


def serve(
    run_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 8765,
    ui_dir: str | Path | None = None,
) -> None:
    """Blocking entry point used by the CLI."""
    state = load_state(run_dir, ui_dir)
    server = make_server(state, host, port)
    log.info("serving %s on http://%s:%d", run_dir, host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
