"""Capture explorer API responses into frontend test fixtures.

The frontend tests run without a live service; these JSON files are
recorded from the real FastAPI app so the mocked responses cannot
drift from what the server actually returns.  Re-run after changing
explorer_service response shapes.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from tokengraph.explorer_service import build_snapshot, create_app
from tokengraph.synthetic_scenarios import generate

OUT_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def capture(client, name, url, out):
    resp = client.get(url)
    out[name] = {"status": resp.status_code, "body": resp.json()}


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    fig2 = generate("fig2")
    labels = {addr: name for name, addr in fig2.labels.items()}
    snapshot = build_snapshot(fig2.expected_meta_events, labels=labels)
    t = fig2.labels
    captured = {}
    with TestClient(create_app(snapshot)) as client:
        capture(client, "summary", "/api/summary", captured)
        capture(client, "components", "/api/components", captured)
        capture(client, "components_filtered", "/api/components?mode=filtered", captured)
        capture(client, "component_0", "/api/component/0", captured)
        capture(client, "component_1", "/api/component/1", captured)
        capture(client, "component_2", "/api/component/2", captured)
        capture(client, "component_missing", "/api/component/99", captured)
        capture(client, "token_t6", f"/api/token/{t['t6']}", captured)
        capture(client, "token_unknown", "/api/token/0x" + "ee" * 20, captured)
        capture(client, "neighborhood_t6_d1", f"/api/neighborhood/{t['t6']}?depth=1", captured)
        capture(client, "neighborhood_t6_d2", f"/api/neighborhood/{t['t6']}?depth=2", captured)
        capture(client, "neighborhood_too_deep", f"/api/neighborhood/{t['t6']}?depth=5", captured)
        capture(client, "edges_top", "/api/edges/top?k=3", captured)
        capture(client, "longest_path_cyclic", "/api/longest-path?mode=unfiltered", captured)
        capture(client, "search_t", "/api/search?q=t", captured)
        capture(client, "search_none", "/api/search?q=zzzz", captured)
        etag = client.get("/api/summary").headers["ETag"]
    captured["_meta"] = {"labels": fig2.labels, "etag": etag}
    (OUT_DIR / "fig2.json").write_text(json.dumps(captured, indent=2) + "\n")

    oneway = generate("one_way_upgrade")
    oneway_labels = {addr: name for name, addr in oneway.labels.items()}
    snapshot = build_snapshot(oneway.expected_meta_events, labels=oneway_labels)
    captured = {}
    with TestClient(create_app(snapshot)) as client:
        capture(client, "summary", "/api/summary", captured)
        capture(client, "components", "/api/components", captured)
        capture(client, "components_filtered", "/api/components?mode=filtered", captured)
    captured["_meta"] = {"labels": oneway.labels}
    (OUT_DIR / "one_way_upgrade.json").write_text(json.dumps(captured, indent=2) + "\n")
    print(f"wrote fixtures to {OUT_DIR}")


if __name__ == "__main__":
    main()
