import io
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from tokengraph.cli import main
from tokengraph.ingestion import group_by_tx, read_logs
from tokengraph.meta_events import PairingPolicy, detect_all, write_meta_events_csv
from tokengraph.synthetic_scenarios import generate, synthetic_address


@pytest.fixture
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def run_pipeline(runner, tmp_path, scenario_args, graph_flags=(), analyze_flags=()):
    """scenario -> detect -> graph -> analyze in one working directory."""
    run_ok(runner, ["scenario", *scenario_args, "--out", str(tmp_path)])
    run_ok(runner, ["detect", str(tmp_path / "logs.jsonl"), "--out", str(tmp_path)])
    run_ok(
        runner,
        ["graph", str(tmp_path / "meta_events.csv"), *graph_flags, "--out", str(tmp_path)],
    )
    run_ok(
        runner,
        ["analyze", str(tmp_path / "graph.json"), *analyze_flags, "--out", str(tmp_path)],
    )
    return json.loads((tmp_path / "analysis.json").read_text())


def test_fig2_pipeline_end_to_end(runner, tmp_path):
    report = run_pipeline(runner, tmp_path, ["fig2"])
    assert report["vertices"] == 8
    assert report["edges"] == 8
    assert report["weak_component_sizes"] == [5, 2, 1]
    assert report["nontrivial_sccs"] == [
        sorted(synthetic_address("fig2", t) for t in ("t1", "t6"))
    ]
    assert report["loops"] == [synthetic_address("fig2", "t7")]
    # cyclic graph: the path report degrades to a structured error
    assert report["longest_path"]["error"] == "cyclic_graph"
    components = (tmp_path / "components.csv").read_text()
    assert components == "component_id,size\n0,5\n1,2\n2,1\n"
    for name in ("degree_hist_in.csv", "degree_hist_out.csv", "scatter.csv", "top_edges.csv"):
        text = (tmp_path / name).read_text()
        assert text.endswith("\n") and "\r" not in text


def test_fig2_condensed_longest_path(runner, tmp_path):
    report = run_pipeline(runner, tmp_path, ["fig2"], analyze_flags=["--condense"])
    path = report["longest_path"]
    assert path["condensed"] is True
    assert path["length"] == 3  # t0 -> {t1,t6} -> t4/t5 collapses to a 3-vertex chain


def test_nine_token_chain_filtered_longest_path(runner, tmp_path):
    report = run_pipeline(
        runner, tmp_path, ["nine_token_chain"], graph_flags=["--filtered"]
    )
    path = report["longest_path"]
    assert path["length"] == 9
    assert path["vertices"] == generate("nine_token_chain").expected.filtered_longest_path


def test_detect_on_empty_jsonl(runner, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    result = run_ok(runner, ["detect", str(empty), "--out", str(tmp_path)])
    stats = json.loads(result.output)
    assert stats["deposit_and_mint"] == 0
    assert stats["withdraw_and_burn"] == 0
    assert stats["malformed_lines"] == 0
    csv_text = (tmp_path / "meta_events.csv").read_text()
    assert csv_text == "source_token,target_token,action,source_amount,target_amount,tx_hash,block_number\n"


def test_detect_reports_malformed_lines(runner, tmp_path, fixture_logs_path, fixture_manifest):
    result = run_ok(runner, ["detect", str(fixture_logs_path), "--out", str(tmp_path)])
    stats = json.loads(result.output)
    assert stats["malformed_lines"] == fixture_manifest["malformed_lines"]
    expected = fixture_manifest["expected_meta_events"]
    assert stats["deposit_and_mint"] == expected["deposit_and_mint"]
    assert stats["withdraw_and_burn"] == expected["withdraw_and_burn"]


def test_detect_strict_policy_flag(runner, tmp_path):
    run_ok(runner, ["scenario", "router_swap_fp", "--out", str(tmp_path)])
    loose_dir, strict_dir = tmp_path / "loose", tmp_path / "strict"
    loose = run_ok(runner, ["detect", str(tmp_path / "logs.jsonl"), "--out", str(loose_dir)])
    strict = run_ok(
        runner,
        ["detect", str(tmp_path / "logs.jsonl"), "--policy", "strict", "--out", str(strict_dir)],
    )
    assert json.loads(loose.output)["deposit_and_mint"] == 1
    assert json.loads(strict.output)["deposit_and_mint"] == 0


def test_cli_csv_matches_in_process_detection(runner, tmp_path):
    run_ok(runner, ["scenario", "random", "--seed", "11", "--size", "40", "--out", str(tmp_path)])
    run_ok(runner, ["detect", str(tmp_path / "logs.jsonl"), "--out", str(tmp_path)])
    batches = group_by_tx(read_logs(tmp_path / "logs.jsonl"))
    buf = io.StringIO()
    write_meta_events_csv(detect_all(batches, PairingPolicy()), buf)
    assert (tmp_path / "meta_events.csv").read_text() == buf.getvalue()


def test_graph_formats(runner, tmp_path):
    run_ok(runner, ["scenario", "vault_roundtrip", "--out", str(tmp_path)])
    run_ok(runner, ["detect", str(tmp_path / "logs.jsonl"), "--out", str(tmp_path)])
    meta = str(tmp_path / "meta_events.csv")
    for fmt in ("json", "dot", "graphml"):
        result = run_ok(runner, ["graph", meta, "--format", fmt, "--out", str(tmp_path)])
        assert json.loads(result.output) == {"mode": "unfiltered", "vertices": 2, "edges": 1}
        assert (tmp_path / f"graph.{fmt}").exists()
    assert "digraph" in (tmp_path / "graph.dot").read_text()
    assert "<graphml" in (tmp_path / "graph.graphml").read_text()


def test_graph_filtered_flag_drops_one_way_edges(runner, tmp_path):
    run_ok(runner, ["scenario", "one_way_upgrade", "--out", str(tmp_path)])
    run_ok(runner, ["detect", str(tmp_path / "logs.jsonl"), "--out", str(tmp_path)])
    meta = str(tmp_path / "meta_events.csv")
    plain = run_ok(runner, ["graph", meta, "--out", str(tmp_path)])
    filtered = run_ok(runner, ["graph", meta, "--filtered", "--out", str(tmp_path)])
    assert json.loads(plain.output)["edges"] == 1
    assert json.loads(filtered.output)["edges"] == 0


def test_scenario_writes_ground_truth(runner, tmp_path):
    result = run_ok(runner, ["scenario", "cycle", "--k", "3", "--out", str(tmp_path)])
    assert json.loads(result.output)["scenario"] == "cycle_3"
    truth = json.loads((tmp_path / "ground_truth.json").read_text())
    assert truth["expected"]["filtered_nontrivial_scc_sizes"] == [3]


def test_invalid_scenario_parameter_reports_json_error(runner, tmp_path):
    result = runner.invoke(main, ["scenario", "cycle", "--k", "0", "--out", str(tmp_path)])
    assert result.exit_code != 0
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["error"] == "invalid_scenario"


def test_extract_rejects_inverted_range(runner, tmp_path):
    result = runner.invoke(
        main,
        ["extract", "--rpc-url", "http://127.0.0.1:1", "--from-block", "10",
         "--to-block", "5", "--out", str(tmp_path / "x.jsonl")],
    )
    assert result.exit_code != 0
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["error"] == "invalid_range"


def test_analyze_rejects_garbage_input(runner, tmp_path):
    bad = tmp_path / "graph.json"
    bad.write_text("not json")
    result = runner.invoke(main, ["analyze", str(bad), "--out", str(tmp_path)])
    assert result.exit_code != 0
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["error"] == "analyze_failed"


def test_enrich_annotate(runner, tmp_path):
    run_ok(runner, ["scenario", "vault_roundtrip", "--out", str(tmp_path)])
    run_ok(runner, ["detect", str(tmp_path / "logs.jsonl"), "--out", str(tmp_path)])
    run_ok(runner, ["graph", str(tmp_path / "meta_events.csv"), "--out", str(tmp_path)])
    truth = json.loads((tmp_path / "ground_truth.json").read_text())
    asset = truth["labels"]["asset"]
    snapshot = tmp_path / "snapshot.csv"
    snapshot.write_text(
        "token_address,symbol,market_cap_usd,pool_count,snapshot_date\n"
        f"{asset},VAULTED,10.0,1,2024-04-01\n"
    )
    result = run_ok(
        runner,
        ["enrich", "annotate", str(tmp_path / "graph.json"), str(snapshot),
         "--out", str(tmp_path / "labelled.json")],
    )
    summary = json.loads(result.output)
    assert summary == {"vertices": 2, "labelled": 1, "unlisted": 1}
    assert "VAULTED" in Path(tmp_path / "labelled.json").read_text()


def test_outputs_are_reproducible(runner, tmp_path):
    a = run_pipeline(runner, tmp_path / "a", ["fig2"])
    b = run_pipeline(runner, tmp_path / "b", ["fig2"])
    assert a == b
    for name in ("logs.jsonl", "meta_events.csv", "graph.json", "analysis.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
