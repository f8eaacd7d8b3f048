"""The token graph: directed edges from tokenised asset to share.

Meta-events are aggregated into a simple directed graph with per-edge
evidence (action counts, amount sums, sample transactions).  Loops are
permitted.  Isolated vertices are never stored: every vertex is
incident to at least one edge.
"""

from __future__ import annotations

import bisect
import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional
from xml.sax.saxutils import escape, quoteattr

from tokengraph.evm_log_model import short_address
from tokengraph.meta_events import (
    ActionKind,
    TokenisingMetaEvent,
    apply_two_way_filter,
)

SAMPLE_TX_CAP = 16


class GraphMode(enum.Enum):
    UNFILTERED = "unfiltered"
    FILTERED = "filtered"


@dataclass(slots=True)
class EdgeEvidence:
    """Aggregate of all meta-events behind one (source, target) edge."""

    deposit_mint_count: int = 0
    withdraw_burn_count: int = 0
    total_source_amount: int = 0
    total_target_amount: int = 0
    first_block: int = 0
    last_block: int = 0
    # (block_number, tx_hash) pairs, kept sorted, capped at SAMPLE_TX_CAP
    samples: list[tuple[int, str]] = field(default_factory=list)

    @property
    def meta_event_count(self) -> int:
        return self.deposit_mint_count + self.withdraw_burn_count

    @property
    def sample_tx_hashes(self) -> list[str]:
        return [tx for _, tx in self.samples]

    def add(self, ev: TokenisingMetaEvent) -> None:
        if self.meta_event_count == 0:
            self.first_block = self.last_block = ev.block_number
        else:
            self.first_block = min(self.first_block, ev.block_number)
            self.last_block = max(self.last_block, ev.block_number)
        if ev.action is ActionKind.DEPOSIT_AND_MINT:
            self.deposit_mint_count += 1
        else:
            self.withdraw_burn_count += 1
        self.total_source_amount += ev.source_amount
        self.total_target_amount += ev.target_amount
        item = (ev.block_number, ev.tx_hash)
        if len(self.samples) < SAMPLE_TX_CAP:
            bisect.insort(self.samples, item)
        elif item < self.samples[-1]:
            bisect.insort(self.samples, item)
            self.samples.pop()


@dataclass
class TokenGraph:
    """Aggregated directed token graph; immutable once built."""

    mode: GraphMode
    vertices: set[str] = field(default_factory=set)
    edges: dict[tuple[str, str], EdgeEvidence] = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for src, tgt in self.edges:
            adj[src].append(tgt)
        for lst in adj.values():
            lst.sort()
        return adj

    def in_adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for src, tgt in self.edges:
            adj[tgt].append(src)
        for lst in adj.values():
            lst.sort()
        return adj


def build(
    events: Iterable[TokenisingMetaEvent],
    mode: GraphMode = GraphMode.UNFILTERED,
    apply_filter: bool = True,
) -> TokenGraph:
    """Aggregate meta-events into a token graph.

    In FILTERED mode the two-way filter is applied internally unless
    the caller already filtered the stream (``apply_filter=False``).
    """
    if mode is GraphMode.FILTERED and apply_filter:
        events = apply_two_way_filter(list(events))
    graph = TokenGraph(mode=mode)
    for ev in events:
        key = (ev.source_token, ev.target_token)
        evidence = graph.edges.get(key)
        if evidence is None:
            evidence = graph.edges[key] = EdgeEvidence()
            graph.vertices.add(ev.source_token)
            graph.vertices.add(ev.target_token)
        evidence.add(ev)
    return graph


def subgraph(graph: TokenGraph, vertices: set[str]) -> TokenGraph:
    """Induced subgraph over the given vertices, evidence preserved.

    Vertices that end up isolated inside the selection are dropped,
    preserving the no-isolated-vertices invariant.
    """
    unknown = vertices - graph.vertices
    if unknown:
        raise KeyError(f"unknown vertices: {sorted(unknown)[:5]}")
    sub = TokenGraph(mode=graph.mode)
    for (src, tgt), evidence in graph.edges.items():
        if src in vertices and tgt in vertices:
            sub.edges[(src, tgt)] = evidence
            sub.vertices.add(src)
            sub.vertices.add(tgt)
    return sub


def _vertex_label(addr: str, labels: Optional[dict[str, str]]) -> str:
    if labels and addr in labels:
        return labels[addr]
    return short_address(addr)


def to_json_dict(graph: TokenGraph, labels: Optional[dict[str, str]] = None) -> dict:
    edges = []
    for (src, tgt) in sorted(graph.edges):
        ev = graph.edges[(src, tgt)]
        edges.append(
            {
                "source": src,
                "target": tgt,
                "deposit_mint_count": ev.deposit_mint_count,
                "withdraw_burn_count": ev.withdraw_burn_count,
                "total_source_amount": str(ev.total_source_amount),
                "total_target_amount": str(ev.total_target_amount),
                "first_block": ev.first_block,
                "last_block": ev.last_block,
                "sample_tx_hashes": ev.sample_tx_hashes,
            }
        )
    out = {
        "mode": graph.mode.value,
        "vertices": sorted(graph.vertices),
        "edges": edges,
    }
    if labels:
        out["labels"] = {a: labels[a] for a in sorted(labels) if a in graph.vertices}
    return out


def from_json_dict(obj: dict) -> TokenGraph:
    graph = TokenGraph(mode=GraphMode(obj["mode"]))
    graph.vertices = set(obj["vertices"])
    for e in obj["edges"]:
        evidence = EdgeEvidence(
            deposit_mint_count=e["deposit_mint_count"],
            withdraw_burn_count=e["withdraw_burn_count"],
            total_source_amount=int(e["total_source_amount"]),
            total_target_amount=int(e["total_target_amount"]),
            first_block=e["first_block"],
            last_block=e["last_block"],
            samples=[(e["first_block"], tx) for tx in e.get("sample_tx_hashes", [])],
        )
        graph.edges[(e["source"], e["target"])] = evidence
    return graph


def to_json(graph: TokenGraph, labels: Optional[dict[str, str]] = None) -> str:
    return json.dumps(to_json_dict(graph, labels), indent=2, sort_keys=False) + "\n"


def to_dot(graph: TokenGraph, labels: Optional[dict[str, str]] = None) -> str:
    lines = ["digraph tokengraph {"]
    for v in sorted(graph.vertices):
        lines.append(f'  "{v}" [label="{_vertex_label(v, labels)}"];')
    for (src, tgt) in sorted(graph.edges):
        ev = graph.edges[(src, tgt)]
        lines.append(f'  "{src}" -> "{tgt}" [label="{ev.meta_event_count}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_graphml(graph: TokenGraph, labels: Optional[dict[str, str]] = None) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
        '  <key id="count" for="edge" attr.name="meta_event_count" attr.type="int"/>',
        f'  <graph id="tokengraph" edgedefault="directed">',
    ]
    for v in sorted(graph.vertices):
        label = escape(_vertex_label(v, labels))
        lines.append(f'    <node id={quoteattr(v)}><data key="label">{label}</data></node>')
    for (src, tgt) in sorted(graph.edges):
        ev = graph.edges[(src, tgt)]
        lines.append(
            f"    <edge source={quoteattr(src)} target={quoteattr(tgt)}>"
            f'<data key="count">{ev.meta_event_count}</data></edge>'
        )
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"
