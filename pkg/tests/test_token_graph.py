import random

import pytest

from tokengraph.meta_events import ActionKind, TokenisingMetaEvent, apply_two_way_filter
from tokengraph.synthetic_scenarios import FIG2_EDGES, generate, synthetic_address
from tokengraph.token_graph import (
    GraphMode,
    build,
    from_json_dict,
    subgraph,
    to_dot,
    to_graphml,
    to_json,
    to_json_dict,
)

SHIB = "0x95ad61" + "0" * 34
XSHIB = "0xb4a812" + "0" * 34


def meta(source, target, action=ActionKind.DEPOSIT_AND_MINT, n=0, block=None):
    return TokenisingMetaEvent(
        source_token=source,
        target_token=target,
        action=action,
        source_amount=n + 1,
        target_amount=n + 2,
        tx_hash="0x" + format(n, "064x"),
        block_number=block if block is not None else n,
        source_log_index=0,
        target_log_index=1,
    )


def fig2_graph():
    labels = {name: synthetic_address("fig2", name) for name in
              {v for e in FIG2_EDGES for v in e}}
    events = [meta(labels[s], labels[t], n=i) for i, (s, t) in enumerate(FIG2_EDGES)]
    return build(events), labels


def test_build_empty_stream():
    g = build([])
    assert g.vertex_count == 0 and g.edge_count == 0


def test_build_aggregates_table2_top_edge():
    # the most significant published edge: 402186 meta-events on one pair
    count = 402186
    events = (
        meta(SHIB, XSHIB,
             ActionKind.DEPOSIT_AND_MINT if i % 2 else ActionKind.WITHDRAW_AND_BURN,
             n=i)
        for i in range(count)
    )
    g = build(events)
    assert g.vertex_count == 2
    assert g.edge_count == 1
    evidence = g.edges[(SHIB, XSHIB)]
    assert evidence.meta_event_count == count
    assert evidence.deposit_mint_count + evidence.withdraw_burn_count == count
    assert evidence.first_block == 0
    assert evidence.last_block == count - 1
    assert len(evidence.sample_tx_hashes) == 16
    # samples are the earliest 16 by block order
    assert evidence.samples == sorted(evidence.samples)
    assert evidence.samples[0][0] == 0 and evidence.samples[-1][0] == 15


def test_build_matches_fig2_fixture_properties():
    g, labels = fig2_graph()
    assert g.vertex_count == 8
    assert g.edge_count == 8
    # exactly one directed 2-cycle {t1, t6}
    two_cycles = {
        frozenset((a, b))
        for (a, b) in g.edges
        if a != b and (b, a) in g.edges
    }
    assert two_cycles == {frozenset((labels["t1"], labels["t6"]))}
    # exactly one loop: t7
    loops = [a for (a, b) in g.edges if a == b]
    assert loops == [labels["t7"]]
    # (t0, t5, t6) is an undirected cycle but not a directed one
    triple = {labels["t0"], labels["t5"], labels["t6"]}
    triple_edges = {(a, b) for (a, b) in g.edges if a in triple and b in triple}
    assert len(triple_edges) == 3
    assert not any((b, a) in triple_edges for (a, b) in triple_edges)


def test_meta_event_conservation():
    rng = random.Random(3)
    tokens = [synthetic_address("cons", str(i)) for i in range(5)]
    events = [
        meta(rng.choice(tokens), rng.choice(tokens), rng.choice(list(ActionKind)), n=i)
        for i in range(200)
    ]
    g = build(events)
    assert sum(ev.meta_event_count for ev in g.edges.values()) == len(events)
    assert sum(ev.total_source_amount for ev in g.edges.values()) == sum(
        e.source_amount for e in events
    )


def test_build_is_order_insensitive():
    rng = random.Random(4)
    tokens = [synthetic_address("perm", str(i)) for i in range(4)]
    events = [
        meta(rng.choice(tokens), rng.choice(tokens), rng.choice(list(ActionKind)), n=i)
        for i in range(60)
    ]
    g1 = build(events)
    shuffled = events[:]
    rng.shuffle(shuffled)
    g2 = build(shuffled)
    assert g1.vertices == g2.vertices
    assert set(g1.edges) == set(g2.edges)
    for key in g1.edges:
        a, b = g1.edges[key], g2.edges[key]
        assert (a.deposit_mint_count, a.withdraw_burn_count) == (
            b.deposit_mint_count,
            b.withdraw_burn_count,
        )
        assert (a.total_source_amount, a.total_target_amount) == (
            b.total_source_amount,
            b.total_target_amount,
        )
        assert (a.first_block, a.last_block) == (b.first_block, b.last_block)


def test_filtered_graph_is_subset_of_unfiltered():
    sc = generate("fig2")
    events = sc.expected_meta_events + generate("vault_roundtrip").expected_meta_events
    unfiltered = build(events, GraphMode.UNFILTERED)
    filtered = build(events, GraphMode.FILTERED)
    assert filtered.vertices <= unfiltered.vertices
    assert set(filtered.edges) <= set(unfiltered.edges)
    assert filtered.edge_count <= unfiltered.edge_count
    for evidence in filtered.edges.values():
        assert evidence.deposit_mint_count >= 1
        assert evidence.withdraw_burn_count >= 1


def test_filtered_mode_accepts_prefiltered_stream():
    events = generate("vault_roundtrip").expected_meta_events
    pre = apply_two_way_filter(events)
    assert build(pre, GraphMode.FILTERED, apply_filter=False).edge_count == 1


def test_subgraph_identity_and_pair():
    g, labels = fig2_graph()
    assert subgraph(g, g.vertices).edges == g.edges
    pair = subgraph(g, {labels["t2"], labels["t3"]})
    assert pair.vertex_count == 2 and pair.edge_count == 1
    loop = subgraph(g, {labels["t7"]})
    assert loop.vertex_count == 1 and loop.edge_count == 1
    with pytest.raises(KeyError):
        subgraph(g, {"0x" + "ee" * 20})


def test_json_round_trip():
    g, _ = fig2_graph()
    back = from_json_dict(to_json_dict(g))
    assert back.mode is g.mode
    assert back.vertices == g.vertices
    assert set(back.edges) == set(g.edges)
    for key in g.edges:
        assert back.edges[key].meta_event_count == g.edges[key].meta_event_count


def test_exports_are_deterministic_text():
    g, labels = fig2_graph()
    display = {addr: name for name, addr in labels.items()}
    for render in (to_json, to_dot, to_graphml):
        first = render(g, labels=display)
        assert first == render(g, labels=display)
        assert first.endswith("\n")
    dot = to_dot(g, labels=display)
    assert "digraph" in dot and '"t7"' in dot.replace("label=", "")
    xml = to_graphml(g)
    assert xml.count("<node") == 8 and xml.count("<edge") == 8
    # unlabelled vertices fall back to the short-address abbreviation
    assert 'label="0x' in to_dot(g)
