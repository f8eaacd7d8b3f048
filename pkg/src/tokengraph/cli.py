"""Pipeline CLI: extract -> detect -> graph -> analyze -> export.

Subcommands compose through files; every output is deterministic given
inputs and flags (LF line endings, trailing newline).  Failures exit
nonzero with a machine-readable error JSON on stderr.
"""

from __future__ import annotations

import io
import json
import sys
from pathlib import Path

import click

from tokengraph import analytics, enrichment, synthetic_scenarios
from tokengraph.evm_log_model import raw_log_to_json
from tokengraph.explorer_service import build_snapshot, create_app
from tokengraph.ingestion import (
    BlockRange,
    IngestStats,
    JsonRpcTransport,
    fetch_logs,
    group_by_tx,
    read_logs,
)
from tokengraph.meta_events import (
    DetectionStats,
    PairingMode,
    PairingPolicy,
    detect_all,
    read_meta_events_csv,
    write_meta_events_csv,
)
from tokengraph.token_graph import (
    GraphMode,
    build,
    from_json_dict,
    to_dot,
    to_graphml,
    to_json,
)


class CliError(click.ClickException):
    """Error reported as JSON on stderr with a nonzero exit status."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind

    def show(self, file=None) -> None:
        payload = {"error": self.kind, "message": self.format_message()}
        print(json.dumps(payload), file=file or sys.stderr)


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


@click.group()
def main() -> None:
    """Token composition graphs from ERC-20 Transfer event logs."""


@main.command()
@click.option("--rpc-url", envvar="TOKENGRAPH_RPC_URL", required=True,
              help="JSON-RPC endpoint (env: TOKENGRAPH_RPC_URL).")
@click.option("--from-block", type=int, required=True)
@click.option("--to-block", type=int, required=True)
@click.option("--chunk-size", type=int, default=2000, show_default=True)
@click.option("--skip-oversized", is_flag=True,
              help="Skip single blocks that still exceed the provider limit.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Output JSONL file.")
def extract(rpc_url, from_block, to_block, chunk_size, skip_oversized, out_path):
    """Fetch Transfer logs over a block range into a JSONL file."""
    try:
        block_range = BlockRange(from_block, to_block)
    except ValueError as exc:
        raise CliError("invalid_range", str(exc))
    transport = JsonRpcTransport(rpc_url)
    stats = IngestStats()
    count = 0
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            for log in fetch_logs(
                transport, block_range, chunk_size=chunk_size,
                skip_oversized=skip_oversized, stats=stats,
            ):
                fh.write(json.dumps(raw_log_to_json(log)) + "\n")
                count += 1
    except Exception as exc:
        raise CliError("extract_failed", str(exc))
    click.echo(json.dumps({"logs": count, "skipped_oversized_blocks": stats.skipped_oversized_blocks}))


def _policy(name: str) -> PairingPolicy:
    return PairingPolicy(mode=PairingMode(name))


@main.command()
@click.argument("logs_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", "policy_name", type=click.Choice(["strict", "loose"]),
              default="loose", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".",
              show_default=True)
def detect(logs_path, policy_name, out_dir):
    """Detect tokenising meta-events in a JSONL log file.

    Writes meta_events.csv and detect_stats.json into --out.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ingest_stats = IngestStats()
    detect_stats = DetectionStats()
    try:
        batches = group_by_tx(read_logs(logs_path, stats=ingest_stats), stats=ingest_stats)
        events = detect_all(batches, _policy(policy_name), detect_stats)
        with open(out / "meta_events.csv", "w", encoding="utf-8", newline="\n") as fh:
            write_meta_events_csv(events, fh)
    except Exception as exc:
        raise CliError("detect_failed", str(exc))
    stats = {
        **detect_stats.as_dict(),
        "malformed_lines": ingest_stats.malformed_lines,
        "dirty_padding": ingest_stats.decode.dirty_padding,
    }
    _write_text(out / "detect_stats.json", json.dumps(stats, indent=2))
    click.echo(json.dumps(stats))


@main.command("graph")
@click.argument("meta_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--filtered", is_flag=True, help="Apply the two-way filter.")
@click.option("--format", "fmt", type=click.Choice(["json", "dot", "graphml"]),
              default="json", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".",
              show_default=True)
def graph_cmd(meta_csv, filtered, fmt, out_dir):
    """Build the token graph from a meta-event CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        with open(meta_csv, "r", encoding="utf-8") as fh:
            events = read_meta_events_csv(fh)
        mode = GraphMode.FILTERED if filtered else GraphMode.UNFILTERED
        g = build(events, mode)
    except Exception as exc:
        raise CliError("graph_failed", str(exc))
    renderers = {"json": to_json, "dot": to_dot, "graphml": to_graphml}
    _write_text(out / f"graph.{fmt}", renderers[fmt](g))
    click.echo(json.dumps({"mode": mode.value, "vertices": g.vertex_count, "edges": g.edge_count}))


@main.command()
@click.argument("graph_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--top-k", type=int, default=5, show_default=True)
@click.option("--condense", is_flag=True,
              help="Report the longest path over the condensation when cyclic.")
@click.option("--longest-path/--no-longest-path", "want_path", default=True,
              show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".",
              show_default=True)
def analyze(graph_json, top_k, condense, want_path, out_dir):
    """Run all topology analytics over a built graph.

    Emits degree_hist_in.csv, degree_hist_out.csv, scatter.csv,
    components.csv, top_edges.csv, and analysis.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        with open(graph_json, "r", encoding="utf-8") as fh:
            g = from_json_dict(json.load(fh))
    except Exception as exc:
        raise CliError("analyze_failed", str(exc))

    with open(out / "degree_hist_in.csv", "w", encoding="utf-8", newline="\n") as in_fh, \
         open(out / "degree_hist_out.csv", "w", encoding="utf-8", newline="\n") as out_fh:
        analytics.write_degree_histograms(g, in_fh, out_fh)
    with open(out / "scatter.csv", "w", encoding="utf-8", newline="\n") as fh:
        analytics.write_scatter(g, fh)
    weak = analytics.weak_components(g)
    with open(out / "components.csv", "w", encoding="utf-8", newline="\n") as fh:
        analytics.write_components(weak, fh)
    ranked = analytics.top_edges(g, top_k)
    top_buf = io.StringIO()
    top_buf.write("source,target,meta_event_count\n")
    for (src, tgt), ev in ranked:
        top_buf.write(f"{src},{tgt},{ev.meta_event_count}\n")
    _write_text(out / "top_edges.csv", top_buf.getvalue())

    scc = analytics.strong_components(g)
    report = {
        "vertices": g.vertex_count,
        "edges": g.edge_count,
        "weak_components": len(weak.components),
        "weak_component_sizes": [len(c) for c in weak.components],
        "nontrivial_sccs": scc.nontrivial,
        "loops": scc.loops,
    }
    if want_path:
        target = analytics.condensation(g) if condense else g
        try:
            path = analytics.longest_path(target)
            report["longest_path"] = {
                "vertices": list(path.vertices),
                "length": path.length,
                "condensed": condense,
            }
        except analytics.CyclicGraphError as exc:
            report["longest_path"] = {"error": "cyclic_graph", "scc": exc.scc}
    _write_text(out / "analysis.json", json.dumps(report, indent=2))
    click.echo(json.dumps({"weak_components": len(weak.components),
                           "nontrivial_sccs": len(scc.nontrivial),
                           "loops": len(scc.loops)}))


@main.group()
def enrich():
    """Snapshot enrichment: fetch provider data or annotate a graph."""


@enrich.command()
@click.option("--provider", type=click.Choice(sorted(enrichment.PROVIDERS)), required=True)
@click.option("--tokens", "tokens_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="File with one token address per line.")
@click.option("--api-key", envvar="TOKENGRAPH_API_KEY", default=None,
              help="Provider API key (env: TOKENGRAPH_API_KEY).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def fetch(provider, tokens_path, api_key, out_path):
    """Fetch a metadata snapshot CSV from a live provider."""
    tokens = [t.strip() for t in Path(tokens_path).read_text().splitlines() if t.strip()]
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            n = enrichment.fetch_snapshot(provider, tokens, fh, api_key=api_key)
    except Exception as exc:
        raise CliError("fetch_failed", str(exc))
    click.echo(json.dumps({"rows": n}))


@enrich.command()
@click.argument("graph_json", type=click.Path(exists=True, dir_okay=False))
@click.argument("snapshot_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def annotate(graph_json, snapshot_csv, out_path):
    """Write the graph JSON with snapshot symbols as vertex labels."""
    try:
        with open(graph_json, "r", encoding="utf-8") as fh:
            g = from_json_dict(json.load(fh))
        with open(snapshot_csv, "r", encoding="utf-8") as fh:
            metadata = enrichment.load_snapshot(fh)
        view = enrichment.annotate(g, metadata)
        _write_text(Path(out_path), to_json(g, labels=view.labels()))
    except Exception as exc:
        raise CliError("annotate_failed", str(exc))
    click.echo(json.dumps({"vertices": g.vertex_count,
                           "labelled": len(view.labels()),
                           "unlisted": len(view.unlisted_vertices())}))


@main.command()
@click.argument("name", type=click.Choice(synthetic_scenarios.SCENARIO_NAMES))
@click.option("--k", type=int, default=1, show_default=True, help="Cycle length.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--size", type=int, default=16, show_default=True,
              help="Event count for random scenarios.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".",
              show_default=True)
def scenario(name, k, seed, size, out_dir):
    """Generate a synthetic scenario: logs.jsonl + ground_truth.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        sc = synthetic_scenarios.generate(name, k=k, seed=seed, size=size)
    except ValueError as exc:
        raise CliError("invalid_scenario", str(exc))
    with open(out / "logs.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        synthetic_scenarios.scenario_to_jsonl(sc, fh)
    truth = {
        "name": sc.name,
        "labels": sc.labels,
        "expected_meta_events": None
        if sc.expected_meta_events is None
        else len(sc.expected_meta_events),
        "expected": {
            key: value
            for key, value in vars(sc.expected).items()
            if value is not None
        },
    }
    _write_text(out / "ground_truth.json", json.dumps(truth, indent=2))
    click.echo(json.dumps({"scenario": sc.name, "logs": len(sc.raw_logs)}))


@main.command()
@click.option("--events", "meta_csv", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Meta-event CSV to serve.")
@click.option("--snapshot", "snapshot_csv", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Optional metadata snapshot CSV.")
@click.option("--bind", default="127.0.0.1:8000", show_default=True)
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the explorer UI assets.")
def serve(meta_csv, snapshot_csv, bind, static_dir):
    """Launch the read-only explorer API over a built snapshot."""
    import uvicorn

    try:
        with open(meta_csv, "r", encoding="utf-8") as fh:
            events = read_meta_events_csv(fh)
        metadata = {}
        if snapshot_csv:
            with open(snapshot_csv, "r", encoding="utf-8") as fh:
                metadata = enrichment.load_snapshot(fh)
        snapshot = build_snapshot(events, metadata=metadata)
        host, _, port = bind.partition(":")
    except Exception as exc:
        raise CliError("serve_failed", str(exc))
    app = create_app(snapshot, static_dir=static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
