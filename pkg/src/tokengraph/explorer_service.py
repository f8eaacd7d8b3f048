"""Read-only HTTP API over a built token graph snapshot.

The snapshot (both graph modes, metadata, precomputed analytics) is
immutable after load; every endpoint is a pure function of it, so
identical requests return identical bodies and a content-hash ETag.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse

from tokengraph import analytics
from tokengraph.enrichment import TokenMetadata
from tokengraph.meta_events import TokenisingMetaEvent, apply_two_way_filter
from tokengraph.token_graph import GraphMode, TokenGraph, build, subgraph, to_json_dict

MAX_NEIGHBORHOOD_DEPTH = 4
MAX_RESPONSE_VERTICES = 2000
COMPONENTS_PAGE_SIZE = 100


@dataclass
class ModeAnalytics:
    graph: TokenGraph
    weak: analytics.ComponentReport
    strong: analytics.SccAnalysis
    degrees: list[analytics.DegreeRecord]
    top_edges: list


@dataclass
class GraphSnapshot:
    unfiltered: ModeAnalytics
    filtered: ModeAnalytics
    metadata: dict[str, TokenMetadata] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)
    content_hash: str = ""

    def for_mode(self, mode: GraphMode) -> ModeAnalytics:
        return self.unfiltered if mode is GraphMode.UNFILTERED else self.filtered


def _analyze_mode(graph: TokenGraph) -> ModeAnalytics:
    return ModeAnalytics(
        graph=graph,
        weak=analytics.weak_components(graph),
        strong=analytics.strong_components(graph),
        degrees=analytics.degree_table(graph),
        top_edges=analytics.top_edges(graph, 5),
    )


def build_snapshot(
    events: Iterable[TokenisingMetaEvent],
    metadata: Optional[dict[str, TokenMetadata]] = None,
    labels: Optional[dict[str, str]] = None,
) -> GraphSnapshot:
    """Build unfiltered and filtered graphs from one meta-event corpus."""
    events = list(events)
    unfiltered = build(events, GraphMode.UNFILTERED)
    filtered = build(apply_two_way_filter(events), GraphMode.FILTERED, apply_filter=False)
    metadata = metadata or {}
    labels = dict(labels or {})
    for addr, meta in metadata.items():
        if meta.symbol:
            labels.setdefault(addr, meta.symbol)
    digest = hashlib.sha256()
    digest.update(json.dumps(to_json_dict(unfiltered), sort_keys=True).encode())
    digest.update(json.dumps(to_json_dict(filtered), sort_keys=True).encode())
    digest.update(json.dumps(sorted(labels.items())).encode())
    return GraphSnapshot(
        unfiltered=_analyze_mode(unfiltered),
        filtered=_analyze_mode(filtered),
        metadata=metadata,
        labels=labels,
        content_hash=digest.hexdigest(),
    )


def _parse_mode(mode: str) -> GraphMode:
    try:
        return GraphMode(mode)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"invalid mode {mode!r}")


def _metadata_dict(snapshot: GraphSnapshot, addr: str) -> Optional[dict]:
    meta = snapshot.metadata.get(addr)
    if meta is None:
        return None
    return {
        "symbol": meta.symbol,
        "market_cap_usd": meta.market_cap_usd,
        "pool_count": meta.pool_count,
        "snapshot_date": meta.snapshot_date.isoformat(),
    }


def _subgraph_payload(snapshot: GraphSnapshot, graph: TokenGraph, vertices: set[str]) -> dict:
    sub = subgraph(graph, vertices)
    payload = to_json_dict(sub, labels=snapshot.labels)
    # include selected-but-isolated vertices so clients can render them
    payload["vertices"] = sorted(vertices)
    return payload


def create_app(snapshot: GraphSnapshot, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="tokengraph explorer", docs_url=None, redoc_url=None)
    etag = f'"{snapshot.content_hash}"'

    @app.middleware("http")
    async def add_etag(request: Request, call_next):
        response = await call_next(request)
        response.headers["ETag"] = etag
        return response

    @app.get("/api/summary")
    def summary():
        out = {}
        for mode in GraphMode:
            ma = snapshot.for_mode(mode)
            out[mode.value] = {
                "vertices": ma.graph.vertex_count,
                "edges": ma.graph.edge_count,
                "weak_components": len(ma.weak.components),
                "nontrivial_sccs": len(ma.strong.nontrivial),
                "loops": len(ma.strong.loops),
            }
        return out

    @app.get("/api/components")
    def components(
        mode: str = "unfiltered",
        min_size: int = Query(default=1, ge=1),
        page: int = Query(default=0, ge=0),
    ):
        ma = snapshot.for_mode(_parse_mode(mode))
        matching = [
            {"id": i, "size": len(comp), "representative": comp[0]}
            for i, comp in enumerate(ma.weak.components)
            if len(comp) >= min_size
        ]
        start = page * COMPONENTS_PAGE_SIZE
        return {
            "total": len(matching),
            "page": page,
            "page_size": COMPONENTS_PAGE_SIZE,
            "components": matching[start : start + COMPONENTS_PAGE_SIZE],
        }

    @app.get("/api/component/{component_id}")
    def component(component_id: int, mode: str = "unfiltered"):
        ma = snapshot.for_mode(_parse_mode(mode))
        if component_id < 0 or component_id >= len(ma.weak.components):
            raise HTTPException(status_code=404, detail="unknown component")
        members = ma.weak.components[component_id]
        truncated = len(members) > MAX_RESPONSE_VERTICES
        selected = set(members[:MAX_RESPONSE_VERTICES])
        payload = _subgraph_payload(snapshot, ma.graph, selected)
        payload["id"] = component_id
        payload["size"] = len(members)
        payload["truncated"] = truncated
        return payload

    @app.get("/api/token/{address}")
    def token(address: str, mode: str = "unfiltered"):
        ma = snapshot.for_mode(_parse_mode(mode))
        addr = address.lower()
        if addr not in ma.graph.vertices:
            raise HTTPException(status_code=404, detail="unknown token")
        in_deg = out_deg = 0
        incident = []
        for (src, tgt), ev in ma.graph.edges.items():
            if src == addr or tgt == addr:
                if src == addr:
                    out_deg += 1
                if tgt == addr:
                    in_deg += 1
                incident.append(
                    {
                        "source": src,
                        "target": tgt,
                        "deposit_mint_count": ev.deposit_mint_count,
                        "withdraw_burn_count": ev.withdraw_burn_count,
                    }
                )
        incident.sort(key=lambda e: (e["source"], e["target"]))
        return {
            "address": addr,
            "label": snapshot.labels.get(addr),
            "metadata": _metadata_dict(snapshot, addr),
            "in_degree": in_deg,
            "out_degree": out_deg,
            "edges": incident,
        }

    @app.get("/api/neighborhood/{address}")
    def neighborhood(
        address: str,
        mode: str = "unfiltered",
        depth: int = Query(default=1, ge=0),
    ):
        if depth > MAX_NEIGHBORHOOD_DEPTH:
            raise HTTPException(
                status_code=400, detail=f"depth exceeds cap {MAX_NEIGHBORHOOD_DEPTH}"
            )
        ma = snapshot.for_mode(_parse_mode(mode))
        addr = address.lower()
        if addr not in ma.graph.vertices:
            raise HTTPException(status_code=404, detail="unknown token")
        # undirected ball: explorers follow composition in either direction
        undirected: dict[str, set[str]] = {}
        for src, tgt in ma.graph.edges:
            undirected.setdefault(src, set()).add(tgt)
            undirected.setdefault(tgt, set()).add(src)
        ball = {addr}
        frontier = [addr]
        truncated = False
        for _ in range(depth):
            nxt = []
            for v in frontier:
                for w in sorted(undirected.get(v, ())):
                    if w not in ball:
                        if len(ball) >= MAX_RESPONSE_VERTICES:
                            truncated = True
                            break
                        ball.add(w)
                        nxt.append(w)
                if truncated:
                    break
            if truncated:
                break
            frontier = nxt
        payload = _subgraph_payload(snapshot, ma.graph, ball)
        payload["center"] = addr
        payload["depth"] = depth
        payload["truncated"] = truncated
        return payload

    @app.get("/api/edges/top")
    def edges_top(mode: str = "unfiltered", k: int = Query(default=5, ge=1)):
        ma = snapshot.for_mode(_parse_mode(mode))
        ranked = analytics.top_edges(ma.graph, k)
        return {
            "edges": [
                {
                    "source": src,
                    "target": tgt,
                    "source_label": snapshot.labels.get(src),
                    "target_label": snapshot.labels.get(tgt),
                    "meta_event_count": ev.meta_event_count,
                    "deposit_mint_count": ev.deposit_mint_count,
                    "withdraw_burn_count": ev.withdraw_burn_count,
                }
                for (src, tgt), ev in ranked
            ]
        }

    @app.get("/api/longest-path")
    def longest_path_endpoint(mode: str = "filtered", condense: bool = False):
        ma = snapshot.for_mode(_parse_mode(mode))
        graph = ma.graph
        if condense:
            graph = analytics.condensation(graph)
        try:
            report = analytics.longest_path(graph)
        except analytics.CyclicGraphError as exc:
            return JSONResponse(
                status_code=409,
                content={"error": "cyclic_graph", "scc": exc.scc},
            )
        return {
            "vertices": list(report.vertices),
            "labels": [snapshot.labels.get(v) for v in report.vertices],
            "length": report.length,
            "condensed": condense,
        }

    @app.get("/api/search")
    def search(q: str = ""):
        query = q.lower()
        hits = []
        if query:
            addrs = snapshot.unfiltered.graph.vertices | snapshot.filtered.graph.vertices
            for addr in sorted(addrs):
                label = snapshot.labels.get(addr)
                if (
                    addr.startswith(query)
                    or addr[2:].startswith(query)
                    or (label and label.lower().startswith(query))
                ):
                    hits.append({"address": addr, "label": label})
                if len(hits) >= 50:
                    break
        return {"results": hits}

    static = Path(static_dir) if static_dir else None

    @app.get("/", response_class=HTMLResponse)
    def index():
        if static and (static / "index.html").is_file():
            return FileResponse(static / "index.html")
        return HTMLResponse(
            "<html><body><h1>tokengraph explorer API</h1>"
            "<p>UI assets not installed; the JSON API lives under /api/.</p>"
            "</body></html>"
        )

    @app.get("/assets/{name}")
    def assets(name: str):
        if static is None:
            raise HTTPException(status_code=404)
        root = (static / "assets").resolve()
        target = (root / name).resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            raise HTTPException(status_code=404)
        return FileResponse(target)

    return app
