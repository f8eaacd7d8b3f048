"""Synthetic Transfer-log scenarios with embedded ground truth.

Every scenario carries its expected meta-events and graph properties,
produced by the generator itself — never inferred from the system under
test.  Scenarios serialize to the standard JSONL log format so the full
pipeline from ingestion onward can be exercised end to end.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Optional

from tokengraph.evm_log_model import (
    ZERO_ADDRESS,
    RawLog,
    TransferEvent,
    encode_transfer,
    raw_log_to_json,
)
from tokengraph.ingestion import TxBatch
from tokengraph.meta_events import (
    ActionKind,
    PairingMode,
    PairingPolicy,
    TokenisingMetaEvent,
    match_pair,
)

ORACLE_MAX_EVENTS = 12


class BatchTooLargeError(ValueError):
    """Brute-force oracle refused a batch above its size bound."""


def synthetic_address(scenario: str, label: str) -> str:
    """Deterministic 20-byte address from (scenario, label).

    Hash-derived, so synthetic addresses never collide with the real
    fixture addresses used elsewhere in the tests.
    """
    digest = hashlib.sha256(f"tokengraph:{scenario}:{label}".encode()).hexdigest()
    return "0x" + digest[:40]


def _tx_hash(scenario: str, n: int) -> str:
    return "0x" + hashlib.sha256(f"tokengraph:tx:{scenario}:{n}".encode()).hexdigest()


@dataclass
class GraphExpectations:
    """Declarative checks the generated log stream must satisfy."""

    unfiltered_vertices: Optional[int] = None
    unfiltered_edges: Optional[int] = None
    filtered_vertices: Optional[int] = None
    filtered_edges: Optional[int] = None
    unfiltered_wcc_sizes: Optional[list[int]] = None
    unfiltered_nontrivial_sccs: Optional[list[list[str]]] = None
    unfiltered_loops: Optional[list[str]] = None
    filtered_nontrivial_scc_sizes: Optional[list[int]] = None
    filtered_loops: Optional[list[str]] = None
    filtered_longest_path: Optional[list[str]] = None


@dataclass
class Scenario:
    name: str
    raw_logs: list[RawLog]
    batches: list[TxBatch]
    labels: dict[str, str] = field(default_factory=dict)
    # None for random scenarios, whose truth comes from the oracle
    expected_meta_events: Optional[list[TokenisingMetaEvent]] = None
    expected: GraphExpectations = field(default_factory=GraphExpectations)


class _Builder:
    """Accumulates transactions; one transaction per block."""

    def __init__(self, scenario: str):
        self.scenario = scenario
        self.raw_logs: list[RawLog] = []
        self.batches: list[TxBatch] = []
        self.expected: list[TokenisingMetaEvent] = []
        self._tx_no = 0
        self._current: Optional[TxBatch] = None

    def begin_tx(self) -> None:
        self._flush()
        self._tx_no += 1
        self._current = TxBatch(
            tx_hash=_tx_hash(self.scenario, self._tx_no),
            block_number=self._tx_no,
            events=[],
        )

    def transfer(self, token: str, from_addr: str, to_addr: str, amount: int) -> TransferEvent:
        assert self._current is not None, "begin_tx() first"
        event = TransferEvent(
            token=token,
            from_addr=from_addr,
            to_addr=to_addr,
            amount=amount,
            block_number=self._current.block_number,
            tx_hash=self._current.tx_hash,
            log_index=len(self._current.events),
        )
        self._current.events.append(event)
        self.raw_logs.append(encode_transfer(event))
        return event

    def deposit_and_mint(self, asset: str, share: str, user: str,
                         amount_in: int, amount_out: int) -> None:
        move = self.transfer(asset, user, share, amount_in)
        mint = self.transfer(share, ZERO_ADDRESS, user, amount_out)
        self.expected.append(
            TokenisingMetaEvent(
                source_token=asset,
                target_token=share,
                action=ActionKind.DEPOSIT_AND_MINT,
                source_amount=amount_in,
                target_amount=amount_out,
                tx_hash=move.tx_hash,
                block_number=move.block_number,
                source_log_index=move.log_index,
                target_log_index=mint.log_index,
            )
        )

    def withdraw_and_burn(self, asset: str, share: str, user: str,
                          amount_out: int, amount_burned: int) -> None:
        burn = self.transfer(share, user, ZERO_ADDRESS, amount_burned)
        move = self.transfer(asset, share, user, amount_out)
        self.expected.append(
            TokenisingMetaEvent(
                source_token=asset,
                target_token=share,
                action=ActionKind.WITHDRAW_AND_BURN,
                source_amount=amount_out,
                target_amount=amount_burned,
                tx_hash=burn.tx_hash,
                block_number=burn.block_number,
                source_log_index=move.log_index,
                target_log_index=burn.log_index,
            )
        )

    def round_trip(self, asset: str, share: str, user: str, amount: int) -> None:
        self.begin_tx()
        self.deposit_and_mint(asset, share, user, amount, amount)
        self.begin_tx()
        self.withdraw_and_burn(asset, share, user, amount, amount)

    def _flush(self) -> None:
        if self._current is not None:
            self.batches.append(self._current)
            self._current = None

    def done(self) -> tuple[list[RawLog], list[TxBatch], list[TokenisingMetaEvent]]:
        self._flush()
        return self.raw_logs, self.batches, self.expected


def _vault_roundtrip() -> Scenario:
    b = _Builder("vault_roundtrip")
    asset = synthetic_address("vault_roundtrip", "asset")
    share = synthetic_address("vault_roundtrip", "share")
    user = synthetic_address("vault_roundtrip", "user")
    b.round_trip(asset, share, user, 1000)
    logs, batches, expected = b.done()
    return Scenario(
        name="vault_roundtrip",
        raw_logs=logs,
        batches=batches,
        labels={"asset": asset, "share": share},
        expected_meta_events=expected,
        expected=GraphExpectations(
            unfiltered_vertices=2,
            unfiltered_edges=1,
            filtered_vertices=2,
            filtered_edges=1,
        ),
    )


def _one_way_upgrade() -> Scenario:
    b = _Builder("one_way_upgrade")
    old = synthetic_address("one_way_upgrade", "old_token")
    new = synthetic_address("one_way_upgrade", "new_token")
    user = synthetic_address("one_way_upgrade", "user")
    b.begin_tx()
    b.deposit_and_mint(old, new, user, 500, 500)
    logs, batches, expected = b.done()
    return Scenario(
        name="one_way_upgrade",
        raw_logs=logs,
        batches=batches,
        labels={"old_token": old, "new_token": new},
        expected_meta_events=expected,
        expected=GraphExpectations(
            unfiltered_vertices=2,
            unfiltered_edges=1,
            filtered_vertices=0,
            filtered_edges=0,
        ),
    )


def _router_swap_fp() -> Scenario:
    # Router-mediated deposit: the asset reaches the share contract from
    # a router address while the mint pays a different user.  LOOSE
    # pairing flags it; STRICT (same user on both legs) rejects it.
    b = _Builder("router_swap_fp")
    stable = synthetic_address("router_swap_fp", "stable")
    a_token = synthetic_address("router_swap_fp", "a_token")
    router = synthetic_address("router_swap_fp", "router")
    user = synthetic_address("router_swap_fp", "user")
    b.begin_tx()
    move = b.transfer(stable, router, a_token, 750)
    mint = b.transfer(a_token, ZERO_ADDRESS, user, 750)
    b.expected.append(
        TokenisingMetaEvent(
            source_token=stable,
            target_token=a_token,
            action=ActionKind.DEPOSIT_AND_MINT,
            source_amount=750,
            target_amount=750,
            tx_hash=move.tx_hash,
            block_number=move.block_number,
            source_log_index=move.log_index,
            target_log_index=mint.log_index,
        )
    )
    logs, batches, expected = b.done()
    return Scenario(
        name="router_swap_fp",
        raw_logs=logs,
        batches=batches,
        labels={"stable": stable, "a_token": a_token, "router": router},
        expected_meta_events=expected,
        expected=GraphExpectations(unfiltered_vertices=2, unfiltered_edges=1),
    )


def _cycle(k: int) -> Scenario:
    if k < 1:
        raise ValueError("cycle scenario needs k >= 1")
    name = f"cycle_{k}"
    tokens = [synthetic_address(name, f"token_{i}") for i in range(k)]
    user = synthetic_address(name, "user")
    b = _Builder(name)
    for i in range(k):
        b.round_trip(tokens[i], tokens[(i + 1) % k], user, 100 + i)
    logs, batches, expected = b.done()
    if k == 1:
        exp = GraphExpectations(
            filtered_vertices=1,
            filtered_edges=1,
            filtered_nontrivial_scc_sizes=[],
            filtered_loops=[tokens[0]],
        )
    else:
        exp = GraphExpectations(
            filtered_vertices=k,
            filtered_edges=k,
            filtered_nontrivial_scc_sizes=[k],
            filtered_loops=[],
        )
    return Scenario(
        name=name,
        raw_logs=logs,
        batches=batches,
        labels={f"token_{i}": t for i, t in enumerate(tokens)},
        expected_meta_events=expected,
        expected=exp,
    )


FIG2_EDGES = [
    ("t0", "t5"),
    ("t5", "t6"),
    ("t0", "t6"),
    ("t1", "t6"),
    ("t6", "t1"),
    ("t4", "t1"),
    ("t2", "t3"),
    ("t7", "t7"),
]


def _fig2() -> Scenario:
    # Eight tokens, eight edges; WCCs of sizes 5/2/1, one directed
    # 2-cycle {t1, t6}, one loop t7, and the undirected-but-not-directed
    # triangle (t0, t5, t6).  One deposit & mint per edge.
    labels = {f"t{i}": synthetic_address("fig2", f"t{i}") for i in range(8)}
    user = synthetic_address("fig2", "user")
    b = _Builder("fig2")
    for n, (src, tgt) in enumerate(FIG2_EDGES):
        b.begin_tx()
        b.deposit_and_mint(labels[src], labels[tgt], user, 10 + n, 10 + n)
    logs, batches, expected = b.done()
    return Scenario(
        name="fig2",
        raw_logs=logs,
        batches=batches,
        labels=labels,
        expected_meta_events=expected,
        expected=GraphExpectations(
            unfiltered_vertices=8,
            unfiltered_edges=8,
            unfiltered_wcc_sizes=[5, 2, 1],
            unfiltered_nontrivial_sccs=[sorted([labels["t1"], labels["t6"]])],
            unfiltered_loops=[labels["t7"]],
        ),
    )


NINE_TOKEN_CHAIN = [
    ("renBTC", "0xeb4c27"),
    ("sBTC", "0xfe18be"),
    ("crvRenWSBTC", "0x075b1b"),
    ("tbtc/sbtcCrv", "0x64eda5"),
    ("btbtc/sbtcCrv", "0xb9d076"),
    ("ibBTC", "0xc4e159"),
    ("wibBTC", "0x8751d4"),
    ("ibbtc/sbtcCRV-f", "0xfbdca6"),
    ("bibbtc/sbtcCRV-f", "0xae96ff"),
]


def _nine_token_chain() -> Scenario:
    # The published longest-path token sequence, embedded in a larger
    # DAG via two shorter side branches; every edge is round-tripped so
    # the filtered graph keeps the whole chain.
    labels = {sym: prefix + "0" * 34 for sym, prefix in NINE_TOKEN_CHAIN}
    chain = [labels[sym] for sym, _ in NINE_TOKEN_CHAIN]
    side_a = synthetic_address("nine_token_chain", "side_a")
    side_b = synthetic_address("nine_token_chain", "side_b")
    labels["side_a"] = side_a
    labels["side_b"] = side_b
    user = synthetic_address("nine_token_chain", "user")
    b = _Builder("nine_token_chain")
    for src, tgt in zip(chain, chain[1:]):
        b.round_trip(src, tgt, user, 42)
    b.round_trip(chain[1], side_a, user, 7)   # dead-end branch off sBTC
    b.round_trip(side_b, chain[5], user, 7)   # short feeder into ibBTC
    logs, batches, expected = b.done()
    return Scenario(
        name="nine_token_chain",
        raw_logs=logs,
        batches=batches,
        labels=labels,
        expected_meta_events=expected,
        expected=GraphExpectations(
            filtered_vertices=11,
            filtered_edges=10,
            filtered_nontrivial_scc_sizes=[],
            filtered_loops=[],
            filtered_longest_path=chain,
        ),
    )


def random_batch(rng: random.Random, name: str, block_number: int,
                 max_events: int = 8) -> TxBatch:
    """One random transaction mixing MINT/BURN/MOVE shapes.

    Addresses are drawn from small token and user pools, with transfer
    endpoints biased toward token contract addresses so that valid
    pairings actually occur.
    """
    tokens = [synthetic_address(name, f"token_{i}") for i in range(4)]
    users = [synthetic_address(name, f"user_{i}") for i in range(3)]
    endpoints = tokens + users
    batch = TxBatch(
        tx_hash=_tx_hash(name, block_number),
        block_number=block_number,
        events=[],
    )
    for i in range(rng.randint(1, max_events)):
        kind = rng.choice(["move", "move", "mint", "burn"])
        token = rng.choice(tokens)
        if kind == "mint":
            from_addr, to_addr = ZERO_ADDRESS, rng.choice(endpoints)
        elif kind == "burn":
            from_addr, to_addr = rng.choice(endpoints), ZERO_ADDRESS
        else:
            from_addr = rng.choice(endpoints)
            to_addr = rng.choice(endpoints)
        batch.events.append(
            TransferEvent(
                token=token,
                from_addr=from_addr,
                to_addr=to_addr,
                amount=rng.randint(0, 10**6),
                block_number=block_number,
                tx_hash=batch.tx_hash,
                log_index=i,
            )
        )
    return batch


def _random(seed: int, size: int) -> Scenario:
    if size > 64:
        raise ValueError("random scenario size capped at 64 events")
    name = f"random_{seed}"
    rng = random.Random(seed)
    batches: list[TxBatch] = []
    raw_logs: list[RawLog] = []
    total = 0
    block = 0
    while total < size:
        block += 1
        batch = random_batch(rng, name, block, max_events=min(8, size - total))
        total += len(batch.events)
        batches.append(batch)
        raw_logs.extend(encode_transfer(ev) for ev in batch.events)
    return Scenario(name=name, raw_logs=raw_logs, batches=batches)


def generate(name: str, k: int = 1, seed: int = 0, size: int = 16) -> Scenario:
    """Build a named scenario deterministically.

    Names: vault_roundtrip, one_way_upgrade, router_swap_fp, cycle
    (with k), fig2, nine_token_chain, random (with seed and size).
    """
    if name == "vault_roundtrip":
        return _vault_roundtrip()
    if name == "one_way_upgrade":
        return _one_way_upgrade()
    if name == "router_swap_fp":
        return _router_swap_fp()
    if name == "cycle":
        return _cycle(k)
    if name == "fig2":
        return _fig2()
    if name == "nine_token_chain":
        return _nine_token_chain()
    if name == "random":
        return _random(seed, size)
    raise ValueError(f"unknown scenario {name!r}")


SCENARIO_NAMES = [
    "vault_roundtrip",
    "one_way_upgrade",
    "router_swap_fp",
    "cycle",
    "fig2",
    "nine_token_chain",
    "random",
]


def scenario_to_jsonl(scenario: Scenario, fh) -> None:
    """Serialize the scenario's raw logs in eth_getLogs wire shape."""
    for log in scenario.raw_logs:
        fh.write(json.dumps(raw_log_to_json(log)) + "\n")


def brute_force_pairings(
    batch: TxBatch, policy: PairingPolicy = PairingPolicy()
) -> set[frozenset[tuple[int, int, ActionKind]]]:
    """All maximal single-use pairings of a batch, by exhaustion.

    Each pairing is a frozenset of (log_index_a, log_index_b, action)
    with a < b.  A pairing is maximal when no further valid pair fits
    among the unused events.  Used as the detection oracle.
    """
    events = batch.events
    n = len(events)
    if n > ORACLE_MAX_EVENTS:
        raise BatchTooLargeError(f"{n} events exceeds oracle bound {ORACLE_MAX_EVENTS}")
    matches: list[tuple[int, int, ActionKind]] = []
    for i in range(n):
        for j in range(i + 1, n):
            meta = match_pair(events[i], events[j], policy)
            if meta is not None:
                matches.append(
                    (events[i].log_index, events[j].log_index, meta.action)
                )
    results: set[frozenset[tuple[int, int, ActionKind]]] = set()
    seen: set[tuple[frozenset, frozenset]] = set()

    def extend(used: frozenset, chosen: frozenset) -> None:
        key = (used, chosen)
        if key in seen:
            return
        seen.add(key)
        open_matches = [m for m in matches if m[0] not in used and m[1] not in used]
        if not open_matches:
            results.add(chosen)
            return
        for m in open_matches:
            extend(used | {m[0], m[1]}, chosen | {m})

    extend(frozenset(), frozenset())
    return results


def max_pairing_size(pairings: set[frozenset]) -> int:
    return max((len(p) for p in pairings), default=0)
