"""Topology analytics over a built token graph.

Significant edges, degree statistics, weakly/strongly connected
components, loops, condensation, and the longest directed path.  All
tie-breaks are address-lexicographic so outputs are reproducible.
Algorithms are linear or near-linear (union-find for WCCs, iterative
Tarjan for SCCs, topological DP for longest paths).
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Optional

from tokengraph.token_graph import EdgeEvidence, TokenGraph


class DegreeAxis(enum.Enum):
    IN = "in"
    OUT = "out"


@dataclass(frozen=True, slots=True)
class DegreeRecord:
    token: str
    in_degree: int
    out_degree: int


class ComponentKind(enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass
class ComponentReport:
    """Partition of the vertex set into components.

    Components are sorted by (size desc, smallest member asc); members
    within a component are sorted.  ``giant`` indexes the largest
    component (ties broken by smallest member address), which is always
    index 0 under this ordering.
    """

    kind: ComponentKind
    components: list[list[str]]
    giant: int
    size_histogram: dict[int, int]


@dataclass
class SccAnalysis:
    report: ComponentReport
    nontrivial: list[list[str]]
    loops: list[str]


@dataclass(frozen=True)
class PathReport:
    vertices: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.vertices)


class CyclicGraphError(ValueError):
    """Longest path requested on a cyclic graph."""

    def __init__(self, scc: list[str]):
        self.scc = scc
        super().__init__(f"graph is cyclic; offending SCC: {scc}")


def top_edges(
    graph: TokenGraph, k: int
) -> list[tuple[tuple[str, str], EdgeEvidence]]:
    """Top-k edges by meta-event count, ties address-lexicographic."""
    ranked = sorted(
        graph.edges.items(), key=lambda item: (-item[1].meta_event_count, item[0])
    )
    return ranked[: max(k, 0)]


def degree_table(graph: TokenGraph) -> list[DegreeRecord]:
    """Per-vertex in/out degrees in address order; a loop adds 1 to each."""
    in_deg = {v: 0 for v in graph.vertices}
    out_deg = {v: 0 for v in graph.vertices}
    for src, tgt in graph.edges:
        out_deg[src] += 1
        in_deg[tgt] += 1
    return [
        DegreeRecord(token=v, in_degree=in_deg[v], out_degree=out_deg[v])
        for v in sorted(graph.vertices)
    ]


def degree_histograms(
    graph: TokenGraph,
) -> tuple[dict[int, int], dict[int, int]]:
    """(in-degree histogram, out-degree histogram): degree -> vertex count."""
    in_hist: dict[int, int] = {}
    out_hist: dict[int, int] = {}
    for rec in degree_table(graph):
        in_hist[rec.in_degree] = in_hist.get(rec.in_degree, 0) + 1
        out_hist[rec.out_degree] = out_hist.get(rec.out_degree, 0) + 1
    return in_hist, out_hist


def top_by_degree(graph: TokenGraph, axis: DegreeAxis, k: int) -> list[DegreeRecord]:
    table = degree_table(graph)
    if axis is DegreeAxis.IN:
        table.sort(key=lambda r: (-r.in_degree, r.token))
    else:
        table.sort(key=lambda r: (-r.out_degree, r.token))
    return table[: max(k, 0)]


def in_out_scatter(graph: TokenGraph) -> list[tuple[int, int, str]]:
    return [(r.in_degree, r.out_degree, r.token) for r in degree_table(graph)]


class _UnionFind:
    __slots__ = ("parent", "rank")

    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in items}

    def find(self, x):
        root = x
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


def _make_report(kind: ComponentKind, groups: list[list[str]]) -> ComponentReport:
    for g in groups:
        g.sort()
    groups.sort(key=lambda g: (-len(g), g[0]))
    hist: dict[int, int] = {}
    for g in groups:
        hist[len(g)] = hist.get(len(g), 0) + 1
    return ComponentReport(
        kind=kind, components=groups, giant=0 if groups else -1, size_histogram=hist
    )


def weak_components(graph: TokenGraph) -> ComponentReport:
    """WCCs of the underlying undirected graph, via union-find."""
    uf = _UnionFind(graph.vertices)
    for src, tgt in graph.edges:
        uf.union(src, tgt)
    grouped: dict[str, list[str]] = {}
    for v in graph.vertices:
        grouped.setdefault(uf.find(v), []).append(v)
    return _make_report(ComponentKind.WEAK, list(grouped.values()))


def _tarjan_sccs(graph: TokenGraph) -> list[list[str]]:
    """Iterative Tarjan; single pass over vertices and edges."""
    adj = graph.out_adjacency()
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0
    for root in sorted(graph.vertices):
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, successors = work[-1]
            advanced = False
            for w in successors:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def strong_components(graph: TokenGraph) -> SccAnalysis:
    """SCC partition plus nontrivial SCCs (size >= 2) and loop vertices."""
    report = _make_report(ComponentKind.STRONG, _tarjan_sccs(graph))
    nontrivial = [c for c in report.components if len(c) >= 2]
    loops = sorted(v for (v, w) in graph.edges if v == w)
    return SccAnalysis(report=report, nontrivial=nontrivial, loops=loops)


def condensation(graph: TokenGraph) -> TokenGraph:
    """Contract each SCC to its smallest member address; drop self-edges.

    Cross-SCC parallel edges merge; their evidence is aggregated.  The
    result is acyclic by construction.
    """
    rep: dict[str, str] = {}
    for comp in _tarjan_sccs(graph):
        r = min(comp)
        for v in comp:
            rep[v] = r
    out = TokenGraph(mode=graph.mode)
    for (src, tgt), evidence in graph.edges.items():
        rs, rt = rep[src], rep[tgt]
        if rs == rt:
            continue
        merged = out.edges.get((rs, rt))
        if merged is None:
            merged = out.edges[(rs, rt)] = EdgeEvidence()
            out.vertices.add(rs)
            out.vertices.add(rt)
        merged.deposit_mint_count += evidence.deposit_mint_count
        merged.withdraw_burn_count += evidence.withdraw_burn_count
        merged.total_source_amount += evidence.total_source_amount
        merged.total_target_amount += evidence.total_target_amount
        if merged.meta_event_count == evidence.meta_event_count:
            merged.first_block = evidence.first_block
            merged.last_block = evidence.last_block
        else:
            merged.first_block = min(merged.first_block, evidence.first_block)
            merged.last_block = max(merged.last_block, evidence.last_block)
    return out


def _topological_order(graph: TokenGraph) -> Optional[list[str]]:
    """Kahn's algorithm; None when the graph has a directed cycle."""
    in_deg = {v: 0 for v in graph.vertices}
    adj = graph.out_adjacency()
    for _, tgt in graph.edges:
        in_deg[tgt] += 1
    frontier = sorted(v for v, d in in_deg.items() if d == 0)
    order: list[str] = []
    while frontier:
        v = frontier.pop()
        order.append(v)
        for w in adj[v]:
            in_deg[w] -= 1
            if in_deg[w] == 0:
                frontier.append(w)
    if len(order) != len(graph.vertices):
        return None
    return order


def longest_path(graph: TokenGraph) -> PathReport:
    """Exact longest directed path on a DAG by topological DP.

    Among maximum-length paths the lexicographically smallest address
    sequence is returned.  Raises CyclicGraphError on cyclic input,
    naming one offending SCC (condense first for cyclic graphs).
    """
    if not graph.vertices:
        return PathReport(vertices=())
    order = _topological_order(graph)
    if order is None:
        analysis = strong_components(graph)
        offender = (
            analysis.nontrivial[0] if analysis.nontrivial else [analysis.loops[0]]
        )
        raise CyclicGraphError(offender)
    adj = graph.out_adjacency()
    # longest path (vertex count) starting at each vertex
    best: dict[str, int] = {}
    for v in reversed(order):
        succ = adj[v]
        best[v] = 1 + max((best[w] for w in succ), default=0)
    max_len = max(best.values())
    start = min(v for v, length in best.items() if length == max_len)
    path = [start]
    current = start
    while best[current] > 1:
        current = min(w for w in adj[current] if best[w] == best[current] - 1)
        path.append(current)
    return PathReport(vertices=tuple(path))


def write_degree_histograms(graph: TokenGraph, in_fh: io.TextIOBase, out_fh: io.TextIOBase) -> None:
    in_hist, out_hist = degree_histograms(graph)
    for hist, fh in ((in_hist, in_fh), (out_hist, out_fh)):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["degree", "count"])
        for degree in sorted(hist):
            writer.writerow([degree, hist[degree]])


def write_scatter(graph: TokenGraph, fh: io.TextIOBase) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["in", "out", "token"])
    for in_deg, out_deg, token in in_out_scatter(graph):
        writer.writerow([in_deg, out_deg, token])


def write_components(report: ComponentReport, fh: io.TextIOBase) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["component_id", "size"])
    for i, comp in enumerate(report.components):
        writer.writerow([i, len(comp)])
